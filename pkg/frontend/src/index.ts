export {
  CURVES_COLUMNS,
  CurveRow,
  SchemaError,
  SUMMARY_COLUMNS,
  SummaryRow,
  TRAJECTORY_COLUMNS,
  TrajectoryRow,
  parseCurvesCsv,
  parseSummaryCsv,
  parseTrajectoryCsv,
} from "./schema.js";
export {
  CurvesOptions,
  TrajectoryOptions,
  TrajectoryXField,
  renderCurvesFigure,
  renderSweepFigure,
  renderTrajectoryFigure,
} from "./render.js";
export { run } from "./cli.js";
