/** Wire types for the annotation service API (all positions 1-based). */

export type Side = "E" | "F";

export interface TokenInfo {
    surface: string;
    position: number;
    kind: "word" | "punctuation";
}

export interface LinkGroupJson {
    e: number[];
    f: number[];
}

export interface NotTranslatedJson {
    side: Side;
    position: number;
}

export interface AnnotationJson {
    verse_id: string;
    annotator_id: string;
    groups: LinkGroupJson[];
    not_translated: NotTranslatedJson[];
    finalized: boolean;
}

export interface PairPayload {
    set_id: string;
    ordinal: number;
    total: number;
    verse_id: string;
    tokens_e: TokenInfo[];
    tokens_f: TokenInfo[];
    annotation: AnnotationJson;
    version: number;
    complete: boolean;
    missing_e: number[];
    missing_f: number[];
}

export interface SetInfo {
    id: string;
    total: number;
    lang_e: string;
    lang_f: string;
    annotators: string[];
}

export interface SaveResult {
    ok: boolean;
    version: number;
    annotation: AnnotationJson;
    complete: boolean;
    missing_e: number[];
    missing_f: number[];
}

export interface AdvanceResult {
    ok: boolean;
    done: boolean;
    next: PairPayload | null;
}

export interface NavResult {
    ok: boolean;
    pair: PairPayload;
}

export interface Progress {
    set_id: string;
    annotator_id: string;
    current: number;
    total: number;
    completed: number;
    elapsed_seconds: number;
    elapsed_hours: number;
}

/** Error payload surfaced by the service (409 incomplete / stale, 400, 404). */
export class ServiceError extends Error {
    status: number;
    missingE: number[];
    missingF: number[];
    currentVersion: number | null;

    constructor(status: number, body: Record<string, unknown>) {
        super(String(body["error"] ?? `service error ${status}`));
        this.status = status;
        this.missingE = (body["missing_e"] as number[]) ?? [];
        this.missingF = (body["missing_f"] as number[]) ?? [];
        this.currentVersion = (body["version"] as number) ?? null;
    }
}

/** The subset of the HTTP API the UI drives; mocked in tests. */
export interface ServiceClient {
    listSets(): Promise<SetInfo[]>;
    getPair(setId: string, ordinal: number, annotator: string): Promise<PairPayload>;
    putPair(
        setId: string,
        ordinal: number,
        annotator: string,
        version: number,
        annotation: { groups: LinkGroupJson[]; not_translated: NotTranslatedJson[] },
    ): Promise<SaveResult>;
    advance(setId: string, ordinal: number, annotator: string): Promise<AdvanceResult>;
    previous(setId: string, ordinal: number, annotator: string): Promise<NavResult>;
    reset(setId: string, ordinal: number, annotator: string): Promise<NavResult>;
    reload(setId: string, ordinal: number, annotator: string): Promise<NavResult>;
    progress(setId: string, annotator: string): Promise<Progress>;
}
