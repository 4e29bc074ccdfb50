import type { FileCluster, TimelineAction, VideoManifest } from "./types.js";

export type Listener = () => void;

/**
 * Client-side view state for one video. The service owns all derived data;
 * this object only tracks what the user is looking at right now.
 */
export class PlayerState {
  /** Playback position in seconds, clamped to the video duration. */
  time = 0;
  /** file_id of the tab currently shown. */
  activeFile: number | null = null;
  /** Timeline rows whose diff hunks are expanded. */
  expanded = new Set<number>();

  private listeners: Listener[] = [];

  constructor(
    public readonly manifest: VideoManifest,
    public readonly files: FileCluster[],
    public readonly timeline: TimelineAction[],
  ) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  notify(): void {
    for (const fn of this.listeners) fn();
  }

  setTime(t: number): void {
    const clamped = Math.min(Math.max(t, 0), this.manifest.duration_s);
    if (clamped === this.time) return;
    this.time = clamped;
    this.notify();
  }

  setActiveFile(fileId: number): void {
    if (!this.files.some((f) => f.file_id === fileId)) {
      throw new Error(`unknown file_id ${fileId}`);
    }
    if (fileId === this.activeFile) return;
    this.activeFile = fileId;
    this.notify();
  }

  fileById(fileId: number): FileCluster | undefined {
    return this.files.find((f) => f.file_id === fileId);
  }

  fileName(fileId: number): string {
    return this.fileById(fileId)?.name ?? `file ${fileId}`;
  }

  /**
   * The cluster owning the nearest member frame at or before t, which is the
   * file on screen at that point of the recording. Null before the first frame.
   */
  ownerAt(t: number): number | null {
    let best: { frame: number; fileId: number } | null = null;
    for (const cluster of this.files) {
      for (const frame of cluster.member_frames) {
        if (frame <= t && (best === null || frame > best.frame)) {
          best = { frame, fileId: cluster.file_id };
        }
      }
    }
    return best === null ? null : best.fileId;
  }

  /**
   * Lines of a file as last captured at or before t. Falls back to the
   * earliest capture when playback has not reached the file yet.
   */
  contentAt(fileId: number, t: number): string[] {
    const cluster = this.fileById(fileId);
    if (!cluster) return [];
    const frames = [...cluster.member_frames].sort((a, b) => a - b);
    let pick: number | null = frames.length ? frames[0] : null;
    for (const frame of frames) {
      if (frame <= t) pick = frame;
    }
    if (pick === null) return [];
    return cluster.content_by_time[String(pick)] ?? [];
  }
}
