/**
 * Render a service-provided MOS value for display.
 *
 * The client never computes or re-rounds scores itself; this only
 * formats the number the service returned to two decimals.
 */
export function formatMos(mos: number | null): string {
	if (mos === null) {
		return 'no grades';
	}
	return mos.toFixed(2);
}

/** Grade label next to the slider, half-point resolution. */
export function formatGrade(value: number): string {
	return value.toFixed(1);
}
