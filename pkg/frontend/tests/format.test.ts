import { describe, expect, it } from 'vitest';

import { formatGrade, formatMos } from '../src/format.js';

describe('formatMos', () => {
	it('renders service values to two decimals', () => {
		expect(formatMos(50)).toBe('50.00');
		expect(formatMos(41.83)).toBe('41.83');
		expect(formatMos(100)).toBe('100.00');
	});

	it('renders ungraded pairs as an empty-state label', () => {
		expect(formatMos(null)).toBe('no grades');
	});

	it('does not re-round beyond the service value', () => {
		// the service already rounded to 2 decimals; formatting is the
		// only transformation the client applies
		expect(formatMos(49.9)).toBe('49.90');
		expect(formatMos(33.33)).toBe('33.33');
	});
});

describe('formatGrade', () => {
	it('shows half-point slider resolution', () => {
		expect(formatGrade(73.5)).toBe('73.5');
		expect(formatGrade(0)).toBe('0.0');
	});
});
