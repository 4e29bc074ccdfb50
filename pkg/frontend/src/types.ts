/** Wire payloads served by the workspace HTTP service. */

export interface VideoManifest {
  video_id: string;
  title: string;
  source: string;
  duration_s: number;
  resolution: [number, number];
}

export interface InformativeReport {
  threshold: number;
  kept: number[];
  /** Dropped frames as [t, anchor] pairs naming the kept frame each one matched. */
  dropped: [number, number][];
}

export interface FrameVerdict {
  t: number;
  valid: boolean;
  confidence: number;
  backend: string;
}

export interface FrameReport {
  informative: InformativeReport;
  classified: { verdicts: FrameVerdict[] };
}

export interface FileCluster {
  file_id: number;
  name: string;
  member_frames: number[];
  /** Reconstructed source lines keyed by frame time (JSON object keys are strings). */
  content_by_time: Record<string, string[]>;
}

export type DiffOp = ["eq" | "ins" | "del", string];

export interface EditAction {
  t: number;
  kind: "edit";
  file_id: number;
  inserted: number;
  deleted: number;
  diff: DiffOp[];
}

export interface SwitchAction {
  t: number;
  kind: "switch";
  from_file: number;
  to_file: number;
}

export type TimelineAction = EditAction | SwitchAction;

export interface CodeAtTime {
  t: number;
  lines: string[];
}

export interface VideoSearchResult {
  video_id: string;
  query: string;
  frames: number[];
}

export interface CorpusHit {
  video_id: string;
  score: number;
  matched_frames: number[];
  all_in_one_frame: boolean;
}

export interface CorpusSearchResult {
  query: string;
  k: number;
  hits: CorpusHit[];
}
