import type { PlayerState } from "./state.js";
import type { EditAction } from "./types.js";

/**
 * Chronological list of reconstructed actions. Edits summarize as
 * "+inserted -deleted" and expand to colored hunks; file switches show
 * which file replaced which. Clicking any timestamp seeks playback.
 */
export class TimelinePanel {
  readonly list: HTMLOListElement;

  constructor(
    readonly root: HTMLElement,
    private readonly state: PlayerState,
    private readonly onSeek: (t: number) => void,
  ) {
    this.list = document.createElement("ol");
    this.list.className = "timeline";
    root.append(this.list);
    this.render();
  }

  render(): void {
    this.list.replaceChildren();
    this.state.timeline.forEach((action, index) => {
      const row = document.createElement("li");
      row.className = `action ${action.kind}`;
      row.dataset.index = String(index);
      row.dataset.t = String(action.t);

      const stamp = document.createElement("button");
      stamp.type = "button";
      stamp.className = "action-time";
      stamp.textContent = `${action.t}s`;
      stamp.addEventListener("click", () => this.onSeek(action.t));
      row.append(stamp);

      if (action.kind === "switch") {
        const label = document.createElement("span");
        label.className = "switch-label";
        label.textContent = `${this.state.fileName(action.from_file)} → ${this.state.fileName(action.to_file)}`;
        row.append(label);
      } else {
        row.append(this.editSummary(action, index));
        if (this.state.expanded.has(index)) {
          row.append(this.hunks(action));
        }
      }
      this.list.append(row);
    });
  }

  private editSummary(action: EditAction, index: number): HTMLSpanElement {
    const summary = document.createElement("span");
    summary.className = "edit-summary";
    const label = document.createElement("span");
    label.textContent = `${this.state.fileName(action.file_id)}  +${action.inserted} -${action.deleted}`;
    const toggle = document.createElement("button");
    toggle.type = "button";
    toggle.className = "expand";
    toggle.textContent = this.state.expanded.has(index) ? "hide diff" : "show diff";
    toggle.addEventListener("click", () => {
      if (!this.state.expanded.delete(index)) {
        this.state.expanded.add(index);
      }
      this.render();
    });
    summary.append(label, toggle);
    return summary;
  }

  private hunks(action: EditAction): HTMLDivElement {
    const box = document.createElement("div");
    box.className = "hunks";
    for (const [op, line] of action.diff) {
      if (op === "eq") continue;
      const hunk = document.createElement("div");
      hunk.className = `hunk ${op}`;
      hunk.textContent = `${op === "ins" ? "+" : "-"} ${line}`;
      box.append(hunk);
    }
    return box;
  }
}
