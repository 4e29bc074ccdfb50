import { ServiceClient } from "./api.js";
import { FilePanel } from "./files.js";
import { PlaybackController, type MediaLike } from "./player.js";
import { SearchPanel } from "./search.js";
import { PlayerState } from "./state.js";
import { TimelinePanel } from "./timeline.js";

export interface AppConfig {
  /** Playhead poll interval in milliseconds. */
  pollMs?: number;
  /** Seekable playback source; defaults to a <video> with a clock fallback. */
  media?: MediaLike;
  /** Where to look for the media file when none is injected. */
  videoUrl?: string;
  /** Video to open when the workspace holds several. */
  videoId?: string;
}

export interface App {
  state: PlayerState;
  controller: PlaybackController;
  media: MediaLike;
  searchPanel: SearchPanel;
  filePanel: FilePanel;
  timelinePanel: TimelinePanel;
  /** One poll step: pull the playhead and refresh every panel. */
  tick(): void;
  stop(): void;
}

function formatTime(t: number): string {
  const whole = Math.floor(Math.max(t, 0));
  const minutes = Math.floor(whole / 60);
  const seconds = String(whole % 60).padStart(2, "0");
  return `${minutes}:${seconds}`;
}

function section(className: string, parent: HTMLElement): HTMLElement {
  const el = document.createElement("section");
  el.className = `pane ${className}`;
  parent.append(el);
  return el;
}

/**
 * Wire the whole player into root. All data comes from the service; the app
 * keeps no caches beyond the responses it rendered, so reloading the page
 * always reflects the workspace on disk.
 */
export async function bootstrap(
  root: HTMLElement,
  api: ServiceClient = new ServiceClient(),
  config: AppConfig = {},
): Promise<App> {
  const manifests = await api.videos();
  if (!manifests.length) {
    root.replaceChildren();
    const empty = document.createElement("p");
    empty.className = "notice";
    empty.textContent = "no processed videos in this workspace";
    root.append(empty);
    throw new Error("workspace has no videos");
  }
  const manifest = manifests.find((m) => m.video_id === config.videoId) ?? manifests[0];
  const [files, timeline] = await Promise.all([
    api.files(manifest.video_id),
    api.timeline(manifest.video_id),
  ]);
  const state = new PlayerState(manifest, files, timeline);

  root.replaceChildren();
  const header = document.createElement("header");
  header.className = "top";
  const title = document.createElement("h1");
  title.textContent = manifest.title || manifest.video_id;
  const playhead = document.createElement("span");
  playhead.className = "playhead";
  header.append(title);
  if (manifests.length > 1) {
    const pick = document.createElement("select");
    pick.className = "video-pick";
    for (const m of manifests) {
      const option = document.createElement("option");
      option.value = m.video_id;
      option.textContent = m.title;
      option.selected = m.video_id === manifest.video_id;
      pick.append(option);
    }
    pick.addEventListener("change", () => {
      stop();
      void bootstrap(root, api, { ...config, videoId: pick.value });
    });
    header.append(pick);
  }
  header.append(playhead);
  root.append(header);

  const panes = document.createElement("div");
  panes.className = "panes";
  root.append(panes);
  const playerPane = section("player-pane", panes);
  const filesPane = section("files-pane", panes);
  const timelinePane = section("timeline-pane", panes);

  let media: MediaLike;
  if (config.media) {
    media = config.media;
    const shell = document.createElement("div");
    shell.className = "media-shell";
    shell.textContent = "external playback source";
    playerPane.append(shell);
  } else {
    const video = document.createElement("video");
    video.className = "media";
    video.controls = true;
    video.preload = "metadata";
    video.src = config.videoUrl ?? `media/${manifest.video_id}.mp4`;
    video.addEventListener(
      "error",
      () => {
        const shell = document.createElement("div");
        shell.className = "media-shell";
        shell.textContent = "media file not found; use the scrubber and timeline to navigate";
        video.replaceWith(shell);
      },
      { once: true },
    );
    playerPane.append(video);
    media = video;
  }
  const controller = new PlaybackController(media, manifest.duration_s);

  const scrubber = document.createElement("input");
  scrubber.type = "range";
  scrubber.className = "scrubber";
  scrubber.min = "0";
  scrubber.max = String(Math.ceil(manifest.duration_s));
  scrubber.step = "1";
  scrubber.value = "0";
  playerPane.append(scrubber);

  const searchHost = document.createElement("div");
  searchHost.className = "search";
  const filesHost = document.createElement("div");
  filesHost.className = "files";
  filesPane.append(searchHost, filesHost);

  const filePanel = new FilePanel(filesHost, state);
  const timelinePanel = new TimelinePanel(timelinePane, state, seek);
  const searchPanel = new SearchPanel(searchHost, api, manifest.video_id, seek);

  function tick(): void {
    const t = controller.time();
    state.setTime(t);
    filePanel.syncToTime(state.time);
    scrubber.value = String(Math.round(state.time));
    playhead.textContent = `${formatTime(state.time)} / ${formatTime(manifest.duration_s)}`;
    for (const row of timelinePanel.list.querySelectorAll<HTMLLIElement>("li.action")) {
      row.classList.toggle("past", Number(row.dataset.t) <= state.time);
    }
  }

  function seek(t: number): void {
    controller.seek(t);
    tick();
  }

  scrubber.addEventListener("input", () => seek(Number(scrubber.value)));

  tick();
  const stopPolling = controller.poll(config.pollMs ?? 500, () => tick());
  function stop(): void {
    stopPolling();
  }

  return { state, controller, media, searchPanel, filePanel, timelinePanel, tick, stop };
}
