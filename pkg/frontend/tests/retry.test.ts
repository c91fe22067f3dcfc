import { describe, expect, it } from 'vitest';

import type { SubmitResult } from '../src/api.js';
import { RetryQueue } from '../src/retry.js';
import type { GradeSubmission } from '../src/types.js';

const grade = (n: number): GradeSubmission => ({
	observer: 'a',
	pair: `pair-${n}`,
	grade: n,
});

describe('RetryQueue', () => {
	it('delivers queued submissions once the service is back', async () => {
		const queue = new RetryQueue();
		queue.enqueue(grade(1));
		queue.enqueue(grade(2));
		const delivered: string[] = [];
		const outcome = await queue.flush(async (g) => {
			delivered.push(g.pair);
			return { ok: true };
		});
		expect(outcome).toEqual({ sent: 2, requeued: 0, rejected: 0 });
		expect(delivered).toEqual(['pair-1', 'pair-2']);
		expect(queue.size()).toBe(0);
	});

	it('requeues submissions that still cannot reach the service', async () => {
		const queue = new RetryQueue();
		queue.enqueue(grade(1));
		const network: SubmitResult = {
			ok: false,
			kind: 'network',
			message: 'down',
		};
		const outcome = await queue.flush(async () => network);
		expect(outcome.requeued).toBe(1);
		expect(queue.size()).toBe(1);
	});

	it('drops submissions the service rejected outright', async () => {
		const queue = new RetryQueue();
		queue.enqueue(grade(1));
		const outcome = await queue.flush(async () => ({
			ok: false,
			kind: 'rejected',
			status: 404,
			message: 'unknown pair',
		}));
		expect(outcome.rejected).toBe(1);
		expect(queue.size()).toBe(0);
	});
});
