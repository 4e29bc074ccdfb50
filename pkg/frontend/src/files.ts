import type { PlayerState } from "./state.js";

/**
 * Tabbed view of the reconstructed files. Playback drives which tab has
 * focus: crossing into a stretch of the video that shows a different file
 * switches the tab. Clicking a tab previews another file without touching
 * playback, and focus stays there until the playhead crosses the next
 * file boundary.
 */
export class FilePanel {
  readonly tabs: HTMLDivElement;
  readonly content: HTMLPreElement;
  private lastOwner: number | null = null;

  constructor(
    readonly root: HTMLElement,
    private readonly state: PlayerState,
  ) {
    this.tabs = document.createElement("div");
    this.tabs.className = "file-tabs";
    this.tabs.setAttribute("role", "tablist");
    this.content = document.createElement("pre");
    this.content.className = "file-content";
    for (const cluster of state.files) {
      const tab = document.createElement("button");
      tab.type = "button";
      tab.className = "file-tab";
      tab.dataset.fileId = String(cluster.file_id);
      tab.setAttribute("role", "tab");
      tab.textContent = cluster.name;
      tab.addEventListener("click", () => {
        this.state.setActiveFile(cluster.file_id);
        this.render();
      });
      this.tabs.append(tab);
    }
    root.append(this.tabs, this.content);
    this.render();
  }

  /**
   * Follow playback. The tab only changes when the owning file changes,
   * so a manually selected tab survives until the next boundary.
   */
  syncToTime(t: number): void {
    const owner = this.state.ownerAt(t);
    if (owner !== null && owner !== this.lastOwner) {
      this.state.setActiveFile(owner);
    }
    this.lastOwner = owner;
    this.render();
  }

  activeTab(): HTMLButtonElement | null {
    return this.tabs.querySelector("button.active");
  }

  render(): void {
    const active = this.state.activeFile;
    for (const tab of this.tabs.querySelectorAll<HTMLButtonElement>("button.file-tab")) {
      const isActive = Number(tab.dataset.fileId) === active;
      tab.classList.toggle("active", isActive);
      tab.setAttribute("aria-selected", String(isActive));
    }
    if (active === null) {
      this.content.textContent = "";
      return;
    }
    this.content.textContent = this.state.contentAt(active, this.state.time).join("\n");
  }
}
