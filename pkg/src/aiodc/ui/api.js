/**
 * Typed client for the annotation service wire API.
 *
 * The UI performs no statistics of its own: every number it displays is a
 * field from one of these responses, and the severity preview is a lookup
 * into the served matrix. Keeping all fetches behind this one client makes
 * that property testable by stubbing it.
 */
export function isWireError(x) {
    return typeof x === "object" && x !== null && "error" in x;
}
/** Error raised for any non-2xx response, carrying the server's error type. */
export class ApiError extends Error {
    status;
    type;
    detail;
    constructor(status, type, detail) {
        super(`${type}: ${detail}`);
        this.status = status;
        this.type = type;
        this.detail = detail;
        this.name = "ApiError";
    }
}
export class ApiClient {
    base;
    fetchFn;
    constructor(base = "", fetchFn = (input, init) => fetch(input, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const response = await this.fetchFn(this.base + path, init);
        let body = null;
        try {
            body = await response.json();
        }
        catch {
            body = null;
        }
        if (!response.ok) {
            const err = (body ?? {});
            throw new ApiError(response.status, err.error ?? `HTTP ${response.status}`, err.detail ?? response.statusText);
        }
        return body;
    }
    post(path, payload) {
        return this.request(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
        });
    }
    health() {
        return this.request("/health");
    }
    taxonomy() {
        return this.request("/taxonomy");
    }
    rubric() {
        return this.request("/rubric");
    }
    sessions() {
        return this.request("/sessions");
    }
    createSession(req) {
        return this.post("/sessions", req);
    }
    nextTask(sid, annotator) {
        const q = encodeURIComponent(annotator);
        return this.request(`/sessions/${encodeURIComponent(sid)}/next?annotator=${q}`);
    }
    submitLabel(sid, annotator, label) {
        return this.post(`/sessions/${encodeURIComponent(sid)}/labels`, {
            annotator,
            label,
        });
    }
    disputes(sid, attribute = "combined") {
        const q = encodeURIComponent(attribute);
        return this.request(`/sessions/${encodeURIComponent(sid)}/disputes?attribute=${q}`);
    }
    resolve(sid, resolver, label) {
        return this.post(`/sessions/${encodeURIComponent(sid)}/resolutions`, {
            resolver,
            label,
        });
    }
    stats(sid) {
        return this.request(`/sessions/${encodeURIComponent(sid)}/stats`);
    }
    oneWay(attr, session) {
        const params = new URLSearchParams({ attr });
        if (session)
            params.set("session", session);
        return this.request(`/analysis/one-way?${params}`);
    }
    twoWay(session) {
        const params = new URLSearchParams();
        if (session)
            params.set("session", session);
        const suffix = params.size ? `?${params}` : "";
        return this.request(`/analysis/two-way${suffix}`);
    }
}
