/** fetch-based ServiceClient for the annotation service HTTP API. */

import {
    AdvanceResult,
    LinkGroupJson,
    NavResult,
    NotTranslatedJson,
    PairPayload,
    Progress,
    SaveResult,
    ServiceClient,
    ServiceError,
    SetInfo,
} from "./types.js";

async function request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await fetch(url, init);
    const body = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
        throw new ServiceError(response.status, body);
    }
    return body as T;
}

export class HttpServiceClient implements ServiceClient {
    constructor(private readonly baseUrl: string = "") {}

    private pairUrl(setId: string, ordinal: number, annotator: string, suffix = ""): string {
        const set = encodeURIComponent(setId);
        const who = encodeURIComponent(annotator);
        return `${this.baseUrl}/api/sets/${set}/pairs/${ordinal}${suffix}?annotator=${who}`;
    }

    async listSets(): Promise<SetInfo[]> {
        const body = await request<{ sets: SetInfo[] }>(`${this.baseUrl}/api/sets`);
        return body.sets;
    }

    getPair(setId: string, ordinal: number, annotator: string): Promise<PairPayload> {
        return request(this.pairUrl(setId, ordinal, annotator));
    }

    putPair(
        setId: string,
        ordinal: number,
        annotator: string,
        version: number,
        annotation: { groups: LinkGroupJson[]; not_translated: NotTranslatedJson[] },
    ): Promise<SaveResult> {
        return request(`${this.pairUrl(setId, ordinal, annotator)}&version=${version}`, {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(annotation),
        });
    }

    advance(setId: string, ordinal: number, annotator: string): Promise<AdvanceResult> {
        return request(this.pairUrl(setId, ordinal, annotator, "/advance"), { method: "POST" });
    }

    previous(setId: string, ordinal: number, annotator: string): Promise<NavResult> {
        return request(this.pairUrl(setId, ordinal, annotator, "/previous"), { method: "POST" });
    }

    reset(setId: string, ordinal: number, annotator: string): Promise<NavResult> {
        return request(this.pairUrl(setId, ordinal, annotator, "/reset"), { method: "POST" });
    }

    reload(setId: string, ordinal: number, annotator: string): Promise<NavResult> {
        return request(this.pairUrl(setId, ordinal, annotator, "/reload"), { method: "POST" });
    }

    progress(setId: string, annotator: string): Promise<Progress> {
        const set = encodeURIComponent(setId);
        const who = encodeURIComponent(annotator);
        return request(`${this.baseUrl}/api/sets/${set}/progress?annotator=${who}`);
    }
}
