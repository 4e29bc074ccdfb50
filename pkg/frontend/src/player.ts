/**
 * Anything with a seekable currentTime. A real <video> element qualifies;
 * when no media file is available the app substitutes a plain clock object
 * so every control still works against the reconstructed timeline.
 */
export interface MediaLike {
  currentTime: number;
}

export class PlaybackController {
  constructor(
    private readonly media: MediaLike,
    private readonly durationS: number,
  ) {}

  time(): number {
    return this.media.currentTime;
  }

  /** Clamp into [0, duration]; seeking to the current position is a no-op. */
  seek(t: number): void {
    const clamped = Math.min(Math.max(t, 0), this.durationS);
    if (this.media.currentTime !== clamped) {
      this.media.currentTime = clamped;
    }
  }

  /** Invoke cb with the playhead position every intervalMs. Returns a stop function. */
  poll(intervalMs: number, cb: (t: number) => void): () => void {
    const handle = setInterval(() => cb(this.time()), intervalMs);
    return () => clearInterval(handle);
  }
}
