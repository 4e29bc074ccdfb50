import type {
  CodeAtTime,
  CorpusSearchResult,
  FileCluster,
  FrameReport,
  TimelineAction,
  VideoManifest,
  VideoSearchResult,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, detail: string) {
    super(`service responded ${status}: ${detail}`);
    this.name = "ServiceError";
  }
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status text when the error body is not JSON
    }
    throw new ServiceError(response.status, detail);
  }
  return (await response.json()) as T;
}

/**
 * Thin typed client for the workspace service. Paths are relative so the
 * player works unchanged when mounted under /app on the same origin.
 */
export class ServiceClient {
  constructor(private readonly base: string = "") {}

  videos(signal?: AbortSignal): Promise<VideoManifest[]> {
    return getJson(`${this.base}/videos`, signal);
  }

  frames(videoId: string, signal?: AbortSignal): Promise<FrameReport> {
    return getJson(`${this.base}/videos/${encodeURIComponent(videoId)}/frames`, signal);
  }

  files(videoId: string, signal?: AbortSignal): Promise<FileCluster[]> {
    return getJson(`${this.base}/videos/${encodeURIComponent(videoId)}/files`, signal);
  }

  timeline(videoId: string, signal?: AbortSignal): Promise<TimelineAction[]> {
    return getJson(`${this.base}/videos/${encodeURIComponent(videoId)}/timeline`, signal);
  }

  codeAt(videoId: string, t: number, signal?: AbortSignal): Promise<CodeAtTime> {
    return getJson(`${this.base}/videos/${encodeURIComponent(videoId)}/code/${t}`, signal);
  }

  searchVideo(videoId: string, query: string, signal?: AbortSignal): Promise<VideoSearchResult> {
    const q = encodeURIComponent(query);
    return getJson(`${this.base}/videos/${encodeURIComponent(videoId)}/search?q=${q}`, signal);
  }

  searchCorpus(query: string, k: number, signal?: AbortSignal): Promise<CorpusSearchResult> {
    return getJson(`${this.base}/search?q=${encodeURIComponent(query)}&k=${k}`, signal);
  }
}
