export { CsvError, REQUIRED_COLUMNS, groupBy, loadRows, numeric } from "./csv.js";
export type { Row } from "./csv.js";
export { PANEL_FILES, renderTauPanels } from "./panels.js";
export type { PanelOptions } from "./panels.js";
export { renderChart } from "./svg.js";
export type { ChartOptions, Series } from "./svg.js";
export { renderTableCommand, renderTables } from "./table.js";
export { run } from "./cli.js";
