import type { SubmitResult } from './api.js';
import type { GradeSubmission } from './types.js';

export interface FlushOutcome {
	sent: number;
	requeued: number;
	rejected: number;
}

/**
 * Holds grade submissions that failed with a transport error until the
 * service is reachable again. Service-side rejections (400/404) are NOT
 * requeued; retrying them would fail forever.
 */
export class RetryQueue {
	private pending: GradeSubmission[] = [];

	enqueue(submission: GradeSubmission): void {
		this.pending.push(submission);
	}

	size(): number {
		return this.pending.length;
	}

	async flush(
		submit: (g: GradeSubmission) => Promise<SubmitResult>,
	): Promise<FlushOutcome> {
		const queue = this.pending;
		this.pending = [];
		const outcome: FlushOutcome = { sent: 0, requeued: 0, rejected: 0 };
		for (const submission of queue) {
			const result = await submit(submission);
			if (result.ok) {
				outcome.sent += 1;
			} else if (result.kind === 'network') {
				this.pending.push(submission);
				outcome.requeued += 1;
			} else {
				outcome.rejected += 1;
			}
		}
		return outcome;
	}
}
