import type { ServiceClient } from "./api.js";

/**
 * In-video search box. Results are the frame times whose reconstructed code
 * mentions every query word; double-clicking one jumps playback there.
 */
export class SearchPanel {
  readonly input: HTMLInputElement;
  readonly results: HTMLUListElement;
  private readonly form: HTMLFormElement;
  private pending: AbortController | null = null;

  constructor(
    readonly root: HTMLElement,
    private readonly api: ServiceClient,
    private readonly videoId: string,
    private readonly onSeek: (t: number) => void,
  ) {
    this.form = document.createElement("form");
    this.form.className = "search-form";
    this.input = document.createElement("input");
    this.input.type = "search";
    this.input.placeholder = "find code in this video";
    this.input.setAttribute("aria-label", "search query");
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Search";
    this.form.append(this.input, button);

    this.results = document.createElement("ul");
    this.results.className = "search-results";

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.run(this.input.value);
    });
    root.append(this.form, this.results);
  }

  async run(query: string): Promise<void> {
    const trimmed = query.trim();
    if (!trimmed) {
      this.showNotice("type a query first");
      return;
    }
    this.pending?.abort();
    this.pending = new AbortController();
    try {
      const result = await this.api.searchVideo(this.videoId, trimmed, this.pending.signal);
      this.renderFrames(result.frames);
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") return;
      this.showNotice(error instanceof Error ? error.message : String(error));
    }
  }

  private renderFrames(frames: number[]): void {
    this.results.replaceChildren();
    if (!frames.length) {
      this.showNotice("no matching frames");
      return;
    }
    for (const t of [...frames].sort((a, b) => a - b)) {
      const item = document.createElement("li");
      item.className = "search-hit";
      item.dataset.t = String(t);
      item.title = "double-click to jump";
      item.textContent = `code match at ${t}s`;
      item.addEventListener("dblclick", () => this.onSeek(t));
      this.results.append(item);
    }
  }

  private showNotice(text: string): void {
    const notice = document.createElement("li");
    notice.className = "notice";
    notice.textContent = text;
    this.results.replaceChildren(notice);
  }
}
