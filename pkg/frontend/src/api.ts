import type { GradeSubmission, MosReport, SessionManifest } from './types.js';

export type SubmitResult =
	| { ok: true }
	| { ok: false; kind: 'rejected'; status: number; message: string }
	| { ok: false; kind: 'network'; message: string };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin client for the grading service. The base URL is '' when the UI is
 * served by the service itself; a fetch implementation can be injected
 * for tests.
 */
export class SessionService {
	constructor(
		private readonly baseUrl: string = '',
		private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
	) {}

	async fetchManifest(): Promise<SessionManifest> {
		const resp = await this.fetchFn(`${this.baseUrl}/session`);
		if (!resp.ok) {
			throw new Error(`session manifest request failed: HTTP ${resp.status}`);
		}
		return (await resp.json()) as SessionManifest;
	}

	async fetchMos(): Promise<MosReport> {
		const resp = await this.fetchFn(`${this.baseUrl}/mos`);
		if (!resp.ok) {
			throw new Error(`MOS request failed: HTTP ${resp.status}`);
		}
		return (await resp.json()) as MosReport;
	}

	/** Absolute URL for a manifest-relative image path. */
	imageUrl(path: string): string {
		return `${this.baseUrl}${path}`;
	}

	/**
	 * POST one grade. Service-side rejections (400 out-of-range, 404
	 * unknown pair) come back as `rejected` with the server's message;
	 * transport failures come back as `network` so the caller can queue
	 * a retry.
	 */
	async submitGrade(submission: GradeSubmission): Promise<SubmitResult> {
		let resp: Response;
		try {
			resp = await this.fetchFn(`${this.baseUrl}/grade`, {
				method: 'POST',
				headers: { 'Content-Type': 'application/json' },
				body: JSON.stringify(submission),
			});
		} catch (err) {
			return { ok: false, kind: 'network', message: String(err) };
		}
		if (resp.status === 204) {
			return { ok: true };
		}
		let message = `HTTP ${resp.status}`;
		try {
			const body = (await resp.json()) as { error?: string };
			if (body.error) {
				message = body.error;
			}
		} catch {
			// non-JSON error body; keep the status text
		}
		return { ok: false, kind: 'rejected', status: resp.status, message };
	}
}
