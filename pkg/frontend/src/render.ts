/** DOM rendering: two token columns, Not-Translated bars, an SVG overlay for
 * link lines, and the four navigation buttons.
 *
 * The two columns scroll together (percentage-synchronized) and the overlay
 * redraws on scroll and resize, so a word and its link targets stay reachable
 * at the same time even when one verse is much longer than the other.
 */

import { PairController } from "./controller.js";
import { syncedScrollTop } from "./scroll.js";
import { Side, TokenInfo } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class PairView {
    private tokenEls = new Map<string, HTMLElement>();
    private columnE: HTMLElement;
    private columnF: HTMLElement;
    private barE: HTMLElement;
    private barF: HTMLElement;
    private overlay: SVGSVGElement;
    private board: HTMLElement;
    private status: HTMLElement;
    private header: HTMLElement;
    private syncing = false;

    constructor(private readonly root: HTMLElement, private readonly controller: PairController) {
        this.root.innerHTML = `
          <div class="header"><span class="title"></span><span class="progress"></span></div>
          <div class="board">
            <div class="ntbar ntbar-e" title="Not Translated (English side)">N T</div>
            <div class="column column-e"></div>
            <div class="column column-f"></div>
            <div class="ntbar ntbar-f" title="Not Translated (French side)">N T</div>
            <svg class="overlay"></svg>
          </div>
          <div class="status"></div>
          <div class="buttons">
            <button class="btn-link">Link</button>
            <button class="btn-prev">&lt;&lt; Prev</button>
            <button class="btn-reset">Reset</button>
            <button class="btn-reload">Reload</button>
            <button class="btn-next">Next &gt;&gt;</button>
          </div>`;
        this.header = this.root.querySelector(".header")!;
        this.board = this.root.querySelector(".board")!;
        this.columnE = this.root.querySelector(".column-e")!;
        this.columnF = this.root.querySelector(".column-f")!;
        this.barE = this.root.querySelector(".ntbar-e")!;
        this.barF = this.root.querySelector(".ntbar-f")!;
        this.overlay = this.root.querySelector(".overlay")!;
        this.status = this.root.querySelector(".status")!;

        this.wireButtons();
        this.wireScrollSync();
        window.addEventListener("resize", () => this.drawLines());
    }

    private wireButtons(): void {
        const on = (selector: string, fn: () => Promise<void> | void) => {
            this.root.querySelector(selector)!.addEventListener("click", () => {
                void Promise.resolve(fn()).then(() => this.render());
            });
        };
        on(".btn-link", () => this.controller.commitLink());
        on(".btn-next", () => this.controller.navigate("next"));
        on(".btn-prev", () => this.controller.navigate("prev"));
        on(".btn-reset", () => this.controller.navigate("reset"));
        on(".btn-reload", () => this.controller.navigate("reload"));
        this.barE.addEventListener("click", () => {
            void this.controller.commitNotTranslated("E").then(() => this.render());
        });
        this.barF.addEventListener("click", () => {
            void this.controller.commitNotTranslated("F").then(() => this.render());
        });
    }

    private wireScrollSync(): void {
        const sync = (from: HTMLElement, to: HTMLElement) => {
            from.addEventListener(
                "scroll",
                () => {
                    if (this.syncing) return;
                    this.syncing = true;
                    to.scrollTop = syncedScrollTop(from, to);
                    this.drawLines();
                    this.syncing = false;
                },
                { passive: true },
            );
        };
        sync(this.columnE, this.columnF);
        sync(this.columnF, this.columnE);
    }

    render(): void {
        const pair = this.controller.pair;
        if (!pair) return;
        this.header.querySelector(".title")!.textContent =
            `${pair.verse_id} — pair ${pair.ordinal} of ${pair.total}`;
        this.renderColumn("E", pair.tokens_e, this.columnE);
        this.renderColumn("F", pair.tokens_f, this.columnF);
        this.status.textContent = this.controller.message ?? (pair.complete ? "complete" : "");
        this.status.classList.toggle("warning", this.controller.message !== null);
        this.drawLines();
    }

    private renderColumn(side: Side, tokens: TokenInfo[], column: HTMLElement): void {
        column.innerHTML = "";
        for (const token of tokens) {
            const el = document.createElement("div");
            el.className = "token";
            el.textContent = token.surface;
            el.dataset.side = side;
            el.dataset.position = String(token.position);
            const visual = this.controller.selection.visual(
                this.controller.annotation, side, token.position,
            );
            el.classList.add(visual);
            const highlights = side === "E" ? this.controller.highlightE : this.controller.highlightF;
            if (highlights.has(token.position)) el.classList.add("unaccounted");
            el.addEventListener("click", () => {
                this.controller.toggleSelect(side, token.position);
                this.render();
            });
            this.tokenEls.set(`${side}:${token.position}`, el);
            column.appendChild(el);
        }
    }

    /** Anchor point of a token box in overlay coordinates. */
    private anchor(side: Side, position: number, edge: "left" | "right"): [number, number] | null {
        const el = this.tokenEls.get(`${side}:${position}`);
        if (!el) return null;
        const box = el.getBoundingClientRect();
        const frame = this.board.getBoundingClientRect();
        const x = (edge === "left" ? box.left : box.right) - frame.left;
        const y = box.top + box.height / 2 - frame.top;
        return [x, y];
    }

    private drawLines(): void {
        const frame = this.board.getBoundingClientRect();
        this.overlay.setAttribute("viewBox", `0 0 ${frame.width} ${frame.height}`);
        this.overlay.innerHTML = "";
        for (const line of this.controller.lines()) {
            let from: [number, number] | null;
            let to: [number, number] | null;
            let cls = "link-line";
            if (line.kind === "link") {
                from = this.anchor("E", line.e, "right");
                to = this.anchor("F", line.f, "left");
            } else {
                cls = "nt-line";
                const bar = line.side === "E" ? this.barE : this.barF;
                const barBox = bar.getBoundingClientRect();
                from = this.anchor(line.side, line.position, line.side === "E" ? "left" : "right");
                to = from && [
                    (line.side === "E" ? barBox.right : barBox.left) - frame.left,
                    Math.min(Math.max(from[1], 0), frame.height),
                ];
            }
            if (!from || !to) continue;
            const seg = document.createElementNS(SVG_NS, "line");
            seg.setAttribute("x1", String(from[0]));
            seg.setAttribute("y1", String(from[1]));
            seg.setAttribute("x2", String(to[0]));
            seg.setAttribute("y2", String(to[1]));
            seg.setAttribute("class", cls);
            this.overlay.appendChild(seg);
        }
    }
}
