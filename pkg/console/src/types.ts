// API payload shapes, mirrored from the service's documented interface.

export interface ModelInput {
  sensorClass: string;
  shape?: number[];
}

export interface ModelDescriptor {
  uuid: string;
  name: string;
  description: string;
  category: string;
  inputs: ModelInput[];
  macs: number;
  minRamKb: number;
  minFlashKb: number;
  metrics: Record<string, number>;
  created: string | null;
  graphIri: string | null;
}

export interface Datapoint {
  role: string;
  semanticType: string;
  address: string;
}

export interface DeviceDescriptor {
  id: string;
  name: string;
  sensorClasses: string[];
  ramKb: number;
  flashKb: number;
  runtimePlatform: string;
  datapoints: Datapoint[];
  graphIri: string | null;
}

export interface RawTriple {
  subject: TermJson;
  predicate: TermJson;
  object: TermJson;
}

export interface TermJson {
  type: "uri" | "literal" | "bnode";
  value: string;
  datatype?: string;
  "xml:lang"?: string;
}

export interface EntityDetail<D> {
  descriptor: D;
  triples: RawTriple[];
}

export interface MatchResult {
  modelUuid: string;
  deviceId: string;
  ramMarginKb: number;
  flashMarginKb: number;
  satisfiedSensors: string[];
  rank: number;
}

export interface SearchHit {
  entityIri: string;
  kind: "model" | "device";
  score: number;
  matchedTerms: string[];
}

export interface TargetDescriptor {
  targetId: string;
  displayName: string;
  compatibleRuntimePlatforms: string[];
  fileManifest: string[];
}

export interface ConfigField {
  name: string;
  description: string;
  valueType: "string" | "integer" | "decimal" | "enum";
  required: boolean;
  file: string;
  default?: unknown;
  choices?: string[];
}

export interface EffortReport {
  userInputCount: number;
  generatedLineCount: number;
  baselineTraditional: number;
  baselineTemplate: number;
  reductionVsTraditional: number;
  reductionVsTemplate: number;
}

export interface ProjectResponse {
  files: Record<string, string>;
  effortReport: EffortReport;
  metadata: {
    modelUuid: string;
    deviceId: string;
    targetId: string;
    generatedAt: string;
  };
}

export interface RecipeInput {
  role: string;
  semanticType: string;
  cardinality: "exactly-one" | "one-or-more";
}

export interface RecipeWidget {
  widgetKind: "counterByClass" | "timeline" | "table";
  boundRole: string;
}

export interface Recipe {
  recipeId: string;
  name: string;
  description: string;
  inputs: RecipeInput[];
  widgets: RecipeWidget[];
}

export interface Assignment {
  deviceId: string;
  datapointRole: string;
  address: string;
}

export interface Binding {
  kind: "binding";
  bindingId: string;
  recipeId: string;
  assignments: Record<string, Assignment[]>;
  status: "proposed" | "acknowledged" | "rejected";
}

export interface AmbiguityReport {
  kind: "ambiguous";
  recipeId: string;
  candidates: Record<string, Assignment[]>;
}

export interface MissingReport {
  kind: "missing";
  recipeId: string;
  missing: { role: string; requiredType: string }[];
}

export type BindingOutcome = Binding | AmbiguityReport | MissingReport;

export interface TelemetryEvent {
  ts: string;
  classLabel: string;
  confidence: number;
  color: string;
}

export interface ApiErrorBody {
  httpStatus: number;
  code: string;
  message: string;
  details?: unknown;
}
