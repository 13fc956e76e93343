/** Pure annotation and selection state.
 *
 * The edit operations mirror the service's supplant semantics: linking or
 * marking Not-Translated removes, in its entirety, every assertion that
 * touches any chosen position.  The service remains the source of truth; the
 * UI applies the same rules optimistically, submits the whole annotation, and
 * re-renders from the service's response.
 */

import type { AnnotationJson, LinkGroupJson, NotTranslatedJson, Side } from "./types.js";

function touchesGroup(group: LinkGroupJson, eSet: Set<number>, fSet: Set<number>): boolean {
    return group.e.some((p) => eSet.has(p)) || group.f.some((p) => fSet.has(p));
}

/** Add a link group, deleting every group or NT mark touching the selection. */
export function applyLink(
    ann: AnnotationJson,
    ePositions: number[],
    fPositions: number[],
): AnnotationJson {
    const eSet = new Set(ePositions);
    const fSet = new Set(fPositions);
    const groups = ann.groups.filter((g) => !touchesGroup(g, eSet, fSet));
    const nts = ann.not_translated.filter(
        (n) => !(n.side === "E" ? eSet.has(n.position) : fSet.has(n.position)),
    );
    groups.push({
        e: [...eSet].sort((a, b) => a - b),
        f: [...fSet].sort((a, b) => a - b),
    });
    return { ...ann, groups, not_translated: nts, finalized: false };
}

/** Mark one word Not-Translated, deleting whatever assertion touched it. */
export function markNotTranslated(ann: AnnotationJson, side: Side, position: number): AnnotationJson {
    const eSet = new Set(side === "E" ? [position] : []);
    const fSet = new Set(side === "F" ? [position] : []);
    const groups = ann.groups.filter((g) => !touchesGroup(g, eSet, fSet));
    const nts = ann.not_translated.filter(
        (n) => !(n.side === side && n.position === position),
    );
    nts.push({ side, position });
    return { ...ann, groups, not_translated: nts, finalized: false };
}

export function emptyAnnotation(verseId: string, annotatorId: string): AnnotationJson {
    return {
        verse_id: verseId,
        annotator_id: annotatorId,
        groups: [],
        not_translated: [],
        finalized: false,
    };
}

/** Cross-product expansion of the groups: one [e, f] entry per link line. */
export function linkTokens(ann: AnnotationJson): Array<[number, number]> {
    const tokens: Array<[number, number]> = [];
    for (const g of ann.groups) {
        for (const e of g.e) {
            for (const f of g.f) {
                tokens.push([e, f]);
            }
        }
    }
    tokens.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
    return tokens;
}

export function isAccounted(ann: AnnotationJson, side: Side, position: number): boolean {
    for (const g of ann.groups) {
        if ((side === "E" ? g.e : g.f).includes(position)) return true;
    }
    return ann.not_translated.some((n) => n.side === side && n.position === position);
}

export type TokenVisual = "plain" | "selected" | "linked";

/** Tracks clicked tokens on both sides; keys are side-qualified positions. */
export class SelectionState {
    private chosen = new Set<string>();

    toggle(side: Side, position: number): void {
        const key = `${side}:${position}`;
        if (this.chosen.has(key)) {
            this.chosen.delete(key);
        } else {
            this.chosen.add(key);
        }
    }

    has(side: Side, position: number): boolean {
        return this.chosen.has(`${side}:${position}`);
    }

    positions(side: Side): number[] {
        const out: number[] = [];
        for (const key of this.chosen) {
            const [s, p] = key.split(":");
            if (s === side) out.push(Number(p));
        }
        return out.sort((a, b) => a - b);
    }

    get size(): number {
        return this.chosen.size;
    }

    clear(): void {
        this.chosen.clear();
    }

    /** Selected wins over linked: the two states never show together. */
    visual(ann: AnnotationJson, side: Side, position: number): TokenVisual {
        if (this.has(side, position)) return "selected";
        if (isAccounted(ann, side, position)) return "linked";
        return "plain";
    }
}
