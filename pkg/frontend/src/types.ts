/** Wire types of the grading service (the only coupling to the backend). */

export interface GradingPair {
	id: string;
	/** Image id of the unimpaired reference. */
	reference: string;
	/** Image id of the component-removed test image. */
	test: string;
	/** Number of removed components; display-only. */
	k: number;
	reference_url: string;
	test_url: string;
}

export interface SessionManifest {
	session: string;
	pairs: GradingPair[];
}

export interface MosEntry {
	id: string;
	k: number;
	count: number;
	/** Arithmetic mean grade, rounded by the SERVICE; null until graded. */
	mos: number | null;
}

export interface MosReport {
	session: string;
	pairs: MosEntry[];
}

export interface GradeSubmission {
	observer: string;
	pair: string;
	grade: number;
}
