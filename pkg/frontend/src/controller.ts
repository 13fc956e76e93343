/** Drives one annotator's session against the service.
 *
 * All mutations flow through the ServiceClient; after every accepted request
 * the controller replaces its annotation with the one the service returned,
 * so no client-only state survives a reload.  Rejections (incomplete advance,
 * stale version) surface as highlights and messages instead of state changes.
 */

import { SelectionState, applyLink, linkTokens, markNotTranslated } from "./model.js";
import {
    AnnotationJson,
    PairPayload,
    ServiceClient,
    ServiceError,
    Side,
} from "./types.js";

export type NavigateAction = "next" | "prev" | "reset" | "reload";

/** A rendered connection: either a word-word link or an NT line to a side bar. */
export type Line =
    | { kind: "link"; e: number; f: number }
    | { kind: "nt"; side: Side; position: number };

export class PairController {
    readonly selection = new SelectionState();
    pair: PairPayload | null = null;
    message: string | null = null;
    highlightE = new Set<number>();
    highlightF = new Set<number>();
    done = false;

    constructor(
        private readonly service: ServiceClient,
        readonly setId: string,
        readonly annotator: string,
    ) {}

    get annotation(): AnnotationJson {
        if (!this.pair) throw new Error("no pair loaded");
        return this.pair.annotation;
    }

    /** Exactly the cross-product expansion of the current annotation. */
    lines(): Line[] {
        if (!this.pair) return [];
        const out: Line[] = linkTokens(this.annotation).map(([e, f]) => ({
            kind: "link" as const,
            e,
            f,
        }));
        for (const n of this.annotation.not_translated) {
            out.push({ kind: "nt", side: n.side, position: n.position });
        }
        return out;
    }

    private swap(pair: PairPayload): void {
        this.pair = pair;
        this.selection.clear();
        this.highlightE.clear();
        this.highlightF.clear();
        this.message = null;
    }

    async load(ordinal: number): Promise<void> {
        this.swap(await this.service.getPair(this.setId, ordinal, this.annotator));
    }

    toggleSelect(side: Side, position: number): void {
        this.selection.toggle(side, position);
        this.message = null;
    }

    /** Submit the full annotation; adopt the service's canonical answer. */
    private async save(next: AnnotationJson): Promise<void> {
        const pair = this.pair!;
        try {
            const saved = await this.service.putPair(
                this.setId,
                pair.ordinal,
                this.annotator,
                pair.version,
                { groups: next.groups, not_translated: next.not_translated },
            );
            pair.annotation = saved.annotation;
            pair.version = saved.version;
            pair.complete = saved.complete;
            pair.missing_e = saved.missing_e;
            pair.missing_f = saved.missing_f;
            this.selection.clear();
        } catch (err) {
            if (err instanceof ServiceError && err.status === 409) {
                // stale version: someone else saved; re-fetch the truth
                await this.load(pair.ordinal);
                this.message = "annotation changed elsewhere, reloaded";
                return;
            }
            throw err;
        }
    }

    /** Link the selected words; needs at least one token on each side. */
    async commitLink(): Promise<void> {
        if (!this.pair) return;
        const e = this.selection.positions("E");
        const f = this.selection.positions("F");
        if (e.length === 0 || f.length === 0) {
            this.message = "select at least one word on each side before linking";
            return;
        }
        await this.save(applyLink(this.annotation, e, f));
    }

    /** Mark the single selected word Not-Translated. */
    async commitNotTranslated(side: Side): Promise<void> {
        if (!this.pair) return;
        const chosen = this.selection.positions(side);
        const other = this.selection.positions(side === "E" ? "F" : "E");
        if (chosen.length !== 1 || other.length !== 0) {
            this.message = "select exactly one word, then mark it Not Translated";
            return;
        }
        await this.save(markNotTranslated(this.annotation, side, chosen[0]));
    }

    async navigate(action: NavigateAction): Promise<void> {
        if (!this.pair) return;
        const ordinal = this.pair.ordinal;
        switch (action) {
            case "next": {
                try {
                    const result = await this.service.advance(this.setId, ordinal, this.annotator);
                    if (result.done || result.next === null) {
                        this.done = true;
                        this.message = "set complete; your work is saved";
                    } else {
                        this.swap(result.next);
                    }
                } catch (err) {
                    if (err instanceof ServiceError && err.status === 409) {
                        this.highlightE = new Set(err.missingE);
                        this.highlightF = new Set(err.missingF);
                        this.message = "every word must be linked or marked Not Translated";
                        return;
                    }
                    throw err;
                }
                break;
            }
            case "prev": {
                const result = await this.service.previous(this.setId, ordinal, this.annotator);
                this.swap(result.pair);
                break;
            }
            case "reset": {
                const result = await this.service.reset(this.setId, ordinal, this.annotator);
                this.swap(result.pair);
                break;
            }
            case "reload": {
                const result = await this.service.reload(this.setId, ordinal, this.annotator);
                this.swap(result.pair);
                break;
            }
        }
    }
}
