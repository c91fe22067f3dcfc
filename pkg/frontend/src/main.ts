import { SessionService } from './api.js';
import { formatGrade, formatMos } from './format.js';
import { RetryQueue } from './retry.js';
import { SessionFlow } from './session.js';
import type { GradingPair } from './types.js';

// Served by the grading service itself by default; ?service=http://...
// points the SPA at a service on another origin during development.
const serviceBase =
	new URLSearchParams(window.location.search).get('service') ?? '';
const service = new SessionService(serviceBase);
const retries = new RetryQueue();

let flow: SessionFlow | null = null;
let observer = '';
let sliderTouched = false;

const app = document.getElementById('app') as HTMLElement;
const banner = document.getElementById('banner') as HTMLElement;

function showBanner(message: string, retry?: () => void): void {
	banner.replaceChildren();
	banner.hidden = false;
	const text = document.createElement('span');
	text.textContent = message;
	banner.append(text);
	if (retry) {
		const button = document.createElement('button');
		button.textContent = 'Retry now';
		button.addEventListener('click', retry);
		banner.append(button);
	}
}

function clearBanner(): void {
	banner.hidden = true;
	banner.replaceChildren();
}

function el<K extends keyof HTMLElementTagNameMap>(
	tag: K,
	props: Partial<HTMLElementTagNameMap[K]> = {},
	...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
	const node = document.createElement(tag);
	Object.assign(node, props);
	node.append(...children);
	return node;
}

function renderObserverGate(): void {
	const input = el('input', {
		id: 'observer-input',
		placeholder: 'observer id',
	});
	const start = el('button', { textContent: 'Start grading session' });
	const hint = el('p', {
		className: 'hint',
		textContent:
			'You will see image pairs: the unimpaired reference on the left, ' +
			'the processed image on the right. Mark a point on the 0-100 ' +
			'line for how close the right image stays to the left one.',
	});
	start.addEventListener('click', () => {
		const value = input.value.trim();
		if (!value) {
			showBanner('enter a non-empty observer id');
			return;
		}
		observer = value;
		clearBanner();
		void startSession();
	});
	app.replaceChildren(
		el('h1', { textContent: 'Image quality grading' }),
		hint,
		el('div', { className: 'gate' }, input, start),
	);
}

async function startSession(): Promise<void> {
	try {
		const manifest = await service.fetchManifest();
		flow = new SessionFlow(manifest.pairs);
	} catch (err) {
		showBanner(`cannot reach the grading service: ${err}`, () => {
			clearBanner();
			void startSession();
		});
		return;
	}
	render();
}

function render(): void {
	if (!flow) {
		renderObserverGate();
		return;
	}
	const view = flow.current();
	if (view.kind === 'done') {
		void renderSummary(view.reason);
		return;
	}
	renderPair(view.pair, view.index, view.total);
}

function renderPair(pair: GradingPair, index: number, total: number): void {
	sliderTouched = false;

	const progress = el('p', {
		className: 'progress',
		textContent: `pair ${index + 1} of ${total} (${pair.k} component${
			pair.k === 1 ? '' : 's'
		} removed)`,
	});

	const reference = el('img', {
		src: service.imageUrl(pair.reference_url),
		alt: 'reference image',
	});
	const test = el('img', {
		src: service.imageUrl(pair.test_url),
		alt: 'image under test',
	});
	const onImageError = () => {
		flow?.skipCurrent('image failed to load');
		showBanner(`pair ${pair.id} skipped: image failed to load`);
		render();
	};
	reference.addEventListener('error', onImageError, { once: true });
	test.addEventListener('error', onImageError, { once: true });

	const slider = el('input', {
		type: 'range',
		min: '0',
		max: '100',
		step: '0.1',
		value: '50',
	});
	slider.setAttribute('list', 'notches');
	const gradeLabel = el('output', { textContent: 'move the slider' });
	const submit = el('button', { textContent: 'Submit grade', disabled: true });
	const inline = el('p', { className: 'inline-error' });

	slider.addEventListener('input', () => {
		sliderTouched = true;
		submit.disabled = false;
		gradeLabel.textContent = formatGrade(Number(slider.value));
	});

	submit.addEventListener('click', () => {
		if (!sliderTouched) {
			return; // untouched slider never submits a default value
		}
		void submitCurrent(pair, Number(slider.value), inline, submit);
	});

	app.replaceChildren(
		progress,
		el(
			'div',
			{ className: 'stimuli' },
			el('figure', {}, reference, el('figcaption', { textContent: 'reference' })),
			el('figure', {}, test, el('figcaption', { textContent: 'under test' })),
		),
		el(
			'div',
			{ className: 'grading-controls' },
			el('span', { className: 'notch-label', textContent: '0' }),
			slider,
			el('span', { className: 'notch-label', textContent: '100' }),
			gradeLabel,
		),
		submit,
		inline,
	);
}

async function submitCurrent(
	pair: GradingPair,
	grade: number,
	inline: HTMLElement,
	submit: HTMLButtonElement,
): Promise<void> {
	const duplicate = flow?.duplicateMessage(observer, pair.id);
	if (duplicate) {
		inline.textContent = duplicate;
		return;
	}
	submit.disabled = true;

	// deliver anything a previous network failure left behind first
	if (retries.size() > 0) {
		await retries.flush((g) => service.submitGrade(g));
	}

	const submission = { observer, pair: pair.id, grade };
	const result = await service.submitGrade(submission);
	if (result.ok) {
		flow?.recordAccepted(observer, pair.id);
		clearBanner();
		flow?.advance();
		render();
		return;
	}
	if (result.kind === 'network') {
		retries.enqueue(submission);
		flow?.recordAccepted(observer, pair.id);
		showBanner(
			`service unreachable; ${retries.size()} grade(s) queued for retry`,
			() => void retries.flush((g) => service.submitGrade(g)),
		);
		flow?.advance();
		render();
		return;
	}
	inline.textContent = `grade rejected: ${result.message}`;
	submit.disabled = false;
}

async function renderSummary(reason: 'completed' | 'empty'): Promise<void> {
	if (reason === 'empty') {
		app.replaceChildren(
			el('h1', { textContent: 'No pairs' }),
			el('p', { textContent: 'This session manifest contains no pairs to grade.' }),
		);
		return;
	}
	let report;
	try {
		report = await service.fetchMos();
	} catch (err) {
		showBanner(`cannot fetch scores: ${err}`, () => void renderSummary(reason));
		return;
	}
	const graded = report.pairs.filter((p) => p.count > 0);
	if (graded.length === 0) {
		app.replaceChildren(
			el('h1', { textContent: 'Session complete' }),
			el('p', { textContent: 'No grades recorded yet.' }),
		);
		return;
	}
	const header = el(
		'tr',
		{},
		el('th', { textContent: 'pair' }),
		el('th', { textContent: 'components removed' }),
		el('th', { textContent: 'grades' }),
		el('th', { textContent: 'MOS' }),
	);
	const rows = report.pairs.map((entry) =>
		el(
			'tr',
			{},
			el('td', { textContent: entry.id }),
			el('td', { textContent: String(entry.k) }),
			el('td', { textContent: String(entry.count) }),
			el('td', { textContent: formatMos(entry.mos) }),
		),
	);
	app.replaceChildren(
		el('h1', { textContent: 'Session complete' }),
		el('p', {
			textContent:
				'Mean opinion scores as computed by the service ' +
				'(arithmetic mean of all recorded grades):',
		}),
		el('table', {}, header, ...rows),
	);
}

renderObserverGate();
