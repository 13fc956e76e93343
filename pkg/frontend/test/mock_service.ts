/** In-memory stand-in for the annotation service.
 *
 * Mirrors the backend contract the UI depends on: compare-and-swap versions on
 * save, completeness-gated advance, persistence on navigation (advance /
 * previous / reload), and memory-only reset so reload restores the last
 * persisted state.
 */

import {
    AdvanceResult,
    AnnotationJson,
    LinkGroupJson,
    NavResult,
    NotTranslatedJson,
    PairPayload,
    Progress,
    SaveResult,
    ServiceClient,
    ServiceError,
    SetInfo,
    TokenInfo,
} from "../src/types.js";
import { emptyAnnotation, isAccounted } from "../src/model.js";

function tokens(surfaces: string[]): TokenInfo[] {
    return surfaces.map((surface, i) => ({ surface, position: i + 1, kind: "word" as const }));
}

interface MockVerse {
    verseId: string;
    tokensE: TokenInfo[];
    tokensF: TokenInfo[];
}

export class MockService implements ServiceClient {
    calls: string[] = [];
    private verses: MockVerse[];
    private memory = new Map<string, AnnotationJson>();
    private persisted = new Map<string, AnnotationJson>();
    private versions = new Map<string, number>();
    private current = 1;

    constructor(verses: Array<[string, string[], string[]]>) {
        this.verses = verses.map(([verseId, e, f]) => ({
            verseId,
            tokensE: tokens(e),
            tokensF: tokens(f),
        }));
    }

    private key(ordinal: number, annotator: string): string {
        return `${annotator}#${ordinal}`;
    }

    private verse(ordinal: number): MockVerse {
        const v = this.verses[ordinal - 1];
        if (!v) throw new ServiceError(404, { error: `pair ${ordinal} out of range` });
        return v;
    }

    private annotationFor(ordinal: number, annotator: string): AnnotationJson {
        return (
            this.memory.get(this.key(ordinal, annotator)) ??
            emptyAnnotation(this.verse(ordinal).verseId, annotator)
        );
    }

    private missing(ann: AnnotationJson, ordinal: number): { e: number[]; f: number[] } {
        const verse = this.verse(ordinal);
        return {
            e: verse.tokensE.map((t) => t.position).filter((p) => !isAccounted(ann, "E", p)),
            f: verse.tokensF.map((t) => t.position).filter((p) => !isAccounted(ann, "F", p)),
        };
    }

    private payload(ordinal: number, annotator: string): PairPayload {
        const verse = this.verse(ordinal);
        const ann = this.annotationFor(ordinal, annotator);
        const missing = this.missing(ann, ordinal);
        return {
            set_id: "mock",
            ordinal,
            total: this.verses.length,
            verse_id: verse.verseId,
            tokens_e: verse.tokensE,
            tokens_f: verse.tokensF,
            annotation: structuredClone(ann),
            version: this.versions.get(this.key(ordinal, annotator)) ?? 0,
            complete: missing.e.length === 0 && missing.f.length === 0,
            missing_e: missing.e,
            missing_f: missing.f,
        };
    }

    async listSets(): Promise<SetInfo[]> {
        this.calls.push("listSets");
        return [
            { id: "mock", total: this.verses.length, lang_e: "en", lang_f: "fr", annotators: [] },
        ];
    }

    async getPair(_set: string, ordinal: number, annotator: string): Promise<PairPayload> {
        this.calls.push(`getPair:${ordinal}`);
        return this.payload(ordinal, annotator);
    }

    async putPair(
        _set: string,
        ordinal: number,
        annotator: string,
        version: number,
        annotation: { groups: LinkGroupJson[]; not_translated: NotTranslatedJson[] },
    ): Promise<SaveResult> {
        this.calls.push(`putPair:${ordinal}`);
        const key = this.key(ordinal, annotator);
        const currentVersion = this.versions.get(key) ?? 0;
        if (version !== currentVersion) {
            throw new ServiceError(409, { error: "stale version", version: currentVersion });
        }
        const verse = this.verse(ordinal);
        const seen = { E: new Set<number>(), F: new Set<number>() };
        const claim = (side: "E" | "F", position: number) => {
            const limit = (side === "E" ? verse.tokensE : verse.tokensF).length;
            if (position < 1 || position > limit) {
                throw new ServiceError(400, { error: `position ${position} out of range` });
            }
            if (seen[side].has(position)) {
                throw new ServiceError(400, { error: `position ${position} claimed twice` });
            }
            seen[side].add(position);
        };
        for (const g of annotation.groups) {
            if (g.e.length === 0 || g.f.length === 0) {
                throw new ServiceError(400, { error: "a link needs both sides" });
            }
            g.e.forEach((p) => claim("E", p));
            g.f.forEach((p) => claim("F", p));
        }
        annotation.not_translated.forEach((n) => claim(n.side, n.position));

        const ann: AnnotationJson = {
            verse_id: verse.verseId,
            annotator_id: annotator,
            groups: structuredClone(annotation.groups),
            not_translated: structuredClone(annotation.not_translated),
            finalized: false,
        };
        this.memory.set(key, ann);
        this.versions.set(key, currentVersion + 1);
        const missing = this.missing(ann, ordinal);
        return {
            ok: true,
            version: currentVersion + 1,
            annotation: structuredClone(ann),
            complete: missing.e.length === 0 && missing.f.length === 0,
            missing_e: missing.e,
            missing_f: missing.f,
        };
    }

    private persist(annotator: string): void {
        for (const [key, ann] of this.memory) {
            if (key.startsWith(`${annotator}#`)) {
                this.persisted.set(key, structuredClone(ann));
            }
        }
    }

    async advance(_set: string, ordinal: number, annotator: string): Promise<AdvanceResult> {
        this.calls.push(`advance:${ordinal}`);
        const ann = this.annotationFor(ordinal, annotator);
        const missing = this.missing(ann, ordinal);
        if (missing.e.length > 0 || missing.f.length > 0) {
            throw new ServiceError(409, {
                error: "incomplete annotation",
                missing_e: missing.e,
                missing_f: missing.f,
            });
        }
        ann.finalized = true;
        this.memory.set(this.key(ordinal, annotator), ann);
        this.persist(annotator);
        const done = ordinal >= this.verses.length;
        this.current = done ? ordinal : ordinal + 1;
        return { ok: true, done, next: done ? null : this.payload(ordinal + 1, annotator) };
    }

    async previous(_set: string, ordinal: number, annotator: string): Promise<NavResult> {
        this.calls.push(`previous:${ordinal}`);
        if (ordinal <= 1) throw new ServiceError(400, { error: "already at the first pair" });
        this.persist(annotator);
        this.current = ordinal - 1;
        return { ok: true, pair: this.payload(ordinal - 1, annotator) };
    }

    async reset(_set: string, ordinal: number, annotator: string): Promise<NavResult> {
        this.calls.push(`reset:${ordinal}`);
        const key = this.key(ordinal, annotator);
        this.memory.set(key, emptyAnnotation(this.verse(ordinal).verseId, annotator));
        this.versions.set(key, (this.versions.get(key) ?? 0) + 1);
        return { ok: true, pair: this.payload(ordinal, annotator) };
    }

    async reload(_set: string, ordinal: number, annotator: string): Promise<NavResult> {
        this.calls.push(`reload:${ordinal}`);
        for (const [key, ann] of this.persisted) {
            if (key.startsWith(`${annotator}#`)) {
                this.memory.set(key, structuredClone(ann));
                this.versions.set(key, (this.versions.get(key) ?? 0) + 1);
            }
        }
        // in-memory-only work on pairs never persisted is dropped
        for (const key of [...this.memory.keys()]) {
            if (key.startsWith(`${annotator}#`) && !this.persisted.has(key)) {
                this.memory.delete(key);
                this.versions.set(key, (this.versions.get(key) ?? 0) + 1);
            }
        }
        return { ok: true, pair: this.payload(ordinal, annotator) };
    }

    async progress(_set: string, annotator: string): Promise<Progress> {
        this.calls.push("progress");
        let completed = 0;
        for (const [key, ann] of this.persisted) {
            if (key.startsWith(`${annotator}#`) && ann.finalized) completed += 1;
        }
        return {
            set_id: "mock",
            annotator_id: annotator,
            current: this.current,
            total: this.verses.length,
            completed,
            elapsed_seconds: 0,
            elapsed_hours: 0,
        };
    }
}
