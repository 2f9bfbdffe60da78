/** Two-pane annotation client: tweet timeline on the left, label form on the right.
 *
 * All state comes from the annotation HTTP API. Nothing is persisted on the
 * client beyond the lifetime of the page; skipped reports are only remembered
 * for the current session.
 */

import {
  ApiClient,
  Counts,
  Label,
  LABELS,
  ReportView,
  Selection,
  SubmitResult,
  TweetRecord,
} from "./api.js";

export interface AppState {
  counts: Counts;
  queue: string[];
  current: ReportView | null;
  tweets: TweetRecord[];
  tweetPagesLoaded: number;
  tweetPageCount: number;
  loadError: string | null;
  formError: string | null;
  done: boolean;
}

export interface App {
  state: AppState;
  idle(): Promise<void>;
  refresh(): Promise<void>;
  loadReport(reportId: string): Promise<void>;
  loadMoreTweets(): Promise<void>;
  submit(): Promise<void>;
  skip(): Promise<void>;
  selectLabel(label: Label): void;
  destroy(): void;
}

const SHORTCUTS: Record<string, Label> = {
  "1": "real",
  "2": "commemoration",
  "3": "fake",
};

function formatUtc(ts: number): string {
  return new Date(ts * 1000).toISOString().replace("T", " ").slice(0, 19) + " UTC";
}

function errorMessage(err: unknown): string {
  if (err instanceof Error) return err.message;
  return String(err);
}

function pickCounts(body: Counts): Counts {
  return { total: body.total, annotated: body.annotated, pending: body.pending };
}

// Static skeleton; every dynamic value is inserted via textContent.
const SKELETON = `
  <header class="topbar">
    <h1>report annotation</h1>
    <span class="counts" data-role="counts"></span>
    <label class="annotator-field">annotator
      <input type="text" data-role="annotator" value="anonymous">
    </label>
    <a data-role="export" target="_blank">export</a>
  </header>
  <div class="banner" data-role="banner" hidden>
    <span data-role="banner-text"></span>
    <button type="button" data-role="retry">retry</button>
  </div>
  <main class="panes">
    <section class="timeline" data-role="timeline">
      <h2 data-role="report-title"></h2>
      <p class="report-meta" data-role="report-meta"></p>
      <ol class="tweet-list" data-role="tweets"></ol>
      <p class="timeline-status" data-role="timeline-status"></p>
    </section>
    <section class="form-pane">
      <form data-role="form">
        <fieldset data-role="candidates">
          <legend>candidate entity</legend>
          <div data-role="candidate-list"></div>
        </fieldset>
        <fieldset data-role="labels">
          <legend>label</legend>
          <div data-role="label-list"></div>
        </fieldset>
        <p class="form-message" data-role="form-message" hidden></p>
        <p class="form-error" data-role="form-error" hidden></p>
        <div class="actions">
          <button type="submit" data-role="submit">submit</button>
          <button type="button" data-role="skip">skip</button>
        </div>
      </form>
    </section>
  </main>
`;

export function createApp(root: HTMLElement, api: ApiClient): App {
  root.innerHTML = SKELETON;

  const el = <T extends HTMLElement>(role: string): T => {
    const found = root.querySelector(`[data-role="${role}"]`);
    if (!found) throw new Error(`missing element: ${role}`);
    return found as T;
  };

  const countsEl = el<HTMLSpanElement>("counts");
  const annotatorInput = el<HTMLInputElement>("annotator");
  const exportLink = el<HTMLAnchorElement>("export");
  const banner = el<HTMLDivElement>("banner");
  const bannerText = el<HTMLSpanElement>("banner-text");
  const retryButton = el<HTMLButtonElement>("retry");
  const reportTitle = el<HTMLHeadingElement>("report-title");
  const reportMeta = el<HTMLParagraphElement>("report-meta");
  const timeline = el<HTMLElement>("timeline");
  const tweetList = el<HTMLOListElement>("tweets");
  const timelineStatus = el<HTMLParagraphElement>("timeline-status");
  const form = el<HTMLFormElement>("form");
  const candidateSet = el<HTMLFieldSetElement>("candidates");
  const candidateList = el<HTMLDivElement>("candidate-list");
  const labelSet = el<HTMLFieldSetElement>("labels");
  const labelList = el<HTMLDivElement>("label-list");
  const formMessage = el<HTMLParagraphElement>("form-message");
  const formError = el<HTMLParagraphElement>("form-error");
  const submitButton = el<HTMLButtonElement>("submit");
  const skipButton = el<HTMLButtonElement>("skip");

  exportLink.href = api.exportUrl();

  const state: AppState = {
    counts: { total: 0, annotated: 0, pending: 0 },
    queue: [],
    current: null,
    tweets: [],
    tweetPagesLoaded: 0,
    tweetPageCount: 0,
    loadError: null,
    formError: null,
    done: false,
  };

  const inflightSubmits = new Set<string>();
  const skippedThisSession = new Set<string>();
  let loadingTweets = false;
  let retryAction: (() => Promise<void>) | null = null;

  let inflight = 0;
  const idleResolvers: Array<() => void> = [];

  function track<T>(fn: () => Promise<T>): Promise<T> {
    inflight += 1;
    const settle = () => {
      inflight -= 1;
      if (inflight === 0) {
        while (idleResolvers.length > 0) idleResolvers.shift()!();
      }
    };
    const p = fn();
    p.then(settle, settle);
    return p;
  }

  function idle(): Promise<void> {
    if (inflight === 0) return Promise.resolve();
    return new Promise((resolve) => idleResolvers.push(resolve));
  }

  function annotatorName(): string {
    const value = annotatorInput.value.trim();
    return value === "" ? "anonymous" : value;
  }

  function renderCounts(): void {
    const c = state.counts;
    countsEl.textContent = `${c.annotated} annotated / ${c.pending} pending / ${c.total} total`;
  }

  function renderBanner(): void {
    if (state.loadError === null) {
      banner.hidden = true;
      bannerText.textContent = "";
    } else {
      banner.hidden = false;
      bannerText.textContent = state.loadError;
    }
  }

  function renderFormError(): void {
    if (state.formError === null) {
      formError.hidden = true;
      formError.textContent = "";
    } else {
      formError.hidden = false;
      formError.textContent = state.formError;
    }
  }

  function renderTweets(): void {
    tweetList.textContent = "";
    for (const tweet of state.tweets) {
      const item = document.createElement("li");
      item.className = "tweet";
      item.dataset.tweetId = tweet.id;
      const time = document.createElement("time");
      time.textContent = formatUtc(tweet.timestamp);
      const user = document.createElement("span");
      user.className = "tweet-user";
      user.textContent = tweet.user_id === "" ? "(unknown)" : `@${tweet.user_id}`;
      const text = document.createElement("p");
      text.className = "tweet-text";
      text.textContent = tweet.text;
      item.append(time, user, text);
      tweetList.append(item);
    }
    if (state.current === null) {
      timelineStatus.textContent = "";
    } else if (state.tweetPagesLoaded < state.tweetPageCount) {
      timelineStatus.textContent = `showing ${state.tweets.length} of ${state.current.tweet_count} tweets, scroll for more`;
    } else {
      timelineStatus.textContent = `all ${state.tweets.length} tweets loaded`;
    }
  }

  function setFormDisabled(disabled: boolean): void {
    candidateSet.disabled = disabled;
    labelSet.disabled = disabled;
    submitButton.disabled = disabled;
    for (const input of Array.from(
      form.querySelectorAll<HTMLInputElement>("input[type=radio]"),
    )) {
      input.disabled = disabled;
    }
  }

  function renderForm(): void {
    candidateList.textContent = "";
    labelList.textContent = "";
    formMessage.hidden = true;
    formMessage.textContent = "";
    renderFormError();

    const report = state.current;
    if (report === null) {
      setFormDisabled(true);
      skipButton.disabled = true;
      formMessage.hidden = false;
      formMessage.textContent = state.done
        ? "no pending reports left in this session"
        : "loading report";
      return;
    }

    skipButton.disabled = false;

    for (const candidate of report.candidates) {
      const row = document.createElement("label");
      row.className = "candidate";
      const input = document.createElement("input");
      input.type = "radio";
      input.name = "candidate";
      input.value = candidate.person_id;
      const name = document.createElement("span");
      name.className = "candidate-name";
      name.textContent = candidate.name;
      const desc = document.createElement("span");
      desc.className = "candidate-desc";
      desc.textContent = candidate.description;
      const death = document.createElement("span");
      death.className = "candidate-death";
      death.textContent = candidate.death_display;
      row.append(input, name, desc, death);
      candidateList.append(row);
    }
    if (report.candidates.length === 1) {
      const only = candidateList.querySelector<HTMLInputElement>("input");
      if (only !== null) only.checked = true;
    }

    for (const [index, label] of LABELS.entries()) {
      const row = document.createElement("label");
      row.className = "label-option";
      row.dataset.label = label;
      const input = document.createElement("input");
      input.type = "radio";
      input.name = "label";
      input.value = label;
      const text = document.createElement("span");
      text.className = "label-text";
      text.textContent = label;
      const key = document.createElement("kbd");
      key.textContent = String(index + 1);
      row.append(input, text, key);
      if (report.suggested_label === label) {
        input.checked = true;
        row.classList.add("suggested");
        const badge = document.createElement("span");
        badge.className = "suggested-badge";
        badge.textContent = "suggested";
        row.append(badge);
      }
      labelList.append(row);
    }

    if (report.candidates.length === 0) {
      setFormDisabled(true);
      formMessage.hidden = false;
      formMessage.textContent =
        "this report has no candidate entities and cannot be annotated here; skip it";
    } else {
      setFormDisabled(false);
    }
  }

  function renderReport(): void {
    const report = state.current;
    if (report === null) {
      reportTitle.textContent = state.done ? "all done" : "loading";
      reportMeta.textContent = "";
    } else {
      reportTitle.textContent = `report ${report.report_id}`;
      const [first, last] = report.day_span;
      const span = first === last ? first : `${first} to ${last}`;
      reportMeta.textContent = `${span}, ${report.tweet_count} tweets`;
    }
    renderTweets();
    renderForm();
  }

  function renderAll(): void {
    renderCounts();
    renderBanner();
    renderReport();
  }

  function checkedValue(name: string): string | null {
    for (const input of Array.from(
      form.querySelectorAll<HTMLInputElement>(`input[name="${name}"]`),
    )) {
      if (input.checked) return input.value;
    }
    return null;
  }

  function setChecked(name: string, value: string): void {
    for (const input of Array.from(
      form.querySelectorAll<HTMLInputElement>(`input[name="${name}"]`),
    )) {
      input.checked = input.value === value;
    }
  }

  function showBanner(message: string, action: () => Promise<void>): void {
    state.loadError = message;
    retryAction = action;
    renderBanner();
  }

  function clearBanner(): void {
    state.loadError = null;
    retryAction = null;
    renderBanner();
  }

  async function loadReportInternal(reportId: string): Promise<void> {
    const view = await api.getReport(reportId, 1);
    state.current = view;
    state.tweets = view.tweets;
    state.tweetPagesLoaded = view.tweet_page;
    state.tweetPageCount = view.tweet_page_count;
    state.formError = null;
    state.done = false;
    clearBanner();
    renderAll();
  }

  async function refillQueue(): Promise<boolean> {
    const list = await api.listReports("pending", 1);
    state.counts = pickCounts(list);
    renderCounts();
    state.queue = list.reports
      .map((r) => r.report_id)
      .filter((id) => !inflightSubmits.has(id) && !skippedThisSession.has(id));
    return state.queue.length > 0;
  }

  async function loadNextInternal(): Promise<void> {
    try {
      let refillsLeft = 1;
      for (;;) {
        const nextId = state.queue.shift();
        if (nextId !== undefined) {
          await loadReportInternal(nextId);
          return;
        }
        if (refillsLeft === 0 || !(await refillQueue())) {
          state.current = null;
          state.tweets = [];
          state.tweetPagesLoaded = 0;
          state.tweetPageCount = 0;
          state.done = true;
          renderAll();
          return;
        }
        refillsLeft -= 1;
      }
    } catch (err) {
      showBanner(
        `failed to load the next report: ${errorMessage(err)}`,
        loadNextInternal,
      );
    }
  }

  async function refreshInternal(): Promise<void> {
    try {
      clearBanner();
      state.done = false;
      const refilled = await refillQueue();
      if (!refilled) {
        state.current = null;
        state.tweets = [];
        state.done = true;
        renderAll();
        return;
      }
      await loadNextInternal();
    } catch (err) {
      showBanner(`failed to load reports: ${errorMessage(err)}`, refreshInternal);
    }
  }

  async function loadMoreTweetsInternal(): Promise<void> {
    const report = state.current;
    if (report === null || loadingTweets) return;
    if (state.tweetPagesLoaded >= state.tweetPageCount) return;
    loadingTweets = true;
    try {
      const page = state.tweetPagesLoaded + 1;
      const view = await api.getReport(report.report_id, page);
      if (state.current !== null && state.current.report_id === report.report_id) {
        state.tweets = state.tweets.concat(view.tweets);
        state.tweetPagesLoaded = page;
        clearBanner();
        renderTweets();
      }
    } catch (err) {
      showBanner(
        `failed to load tweets: ${errorMessage(err)}`,
        loadMoreTweetsInternal,
      );
    } finally {
      loadingTweets = false;
    }
  }

  async function rollback(
    reportId: string,
    attempt: Selection,
    err: unknown,
  ): Promise<void> {
    try {
      await loadReportInternal(reportId);
    } catch (loadErr) {
      showBanner(
        `failed to reload report ${reportId}: ${errorMessage(loadErr)}`,
        () => loadReportInternal(reportId),
      );
      return;
    }
    // The attempted choice is restored so the annotator can correct it.
    setChecked("candidate", attempt.resolved_person_id);
    setChecked("label", attempt.label);
    state.formError = `submission rejected: ${errorMessage(err)}`;
    renderFormError();
  }

  async function submitInternal(): Promise<void> {
    const report = state.current;
    if (report === null || report.candidates.length === 0) return;

    const personId = checkedValue("candidate");
    if (personId === null) {
      state.formError = "select a candidate entity before submitting";
      renderFormError();
      return;
    }
    const labelValue = checkedValue("label");
    if (labelValue === null) {
      state.formError = "select a label before submitting";
      renderFormError();
      return;
    }

    // The payload carries exactly what the controls hold; the label is never
    // rewritten on the way out.
    const selection: Selection = {
      resolved_person_id: personId,
      label: labelValue as Label,
      annotator: annotatorName(),
    };

    state.formError = null;
    renderFormError();
    inflightSubmits.add(report.report_id);
    const post = api.submit(report.report_id, selection);

    // Optimistic advance: move on immediately and reconcile when the POST
    // settles.
    state.counts = {
      total: state.counts.total,
      annotated: state.counts.annotated + 1,
      pending: Math.max(0, state.counts.pending - 1),
    };
    state.current = null;
    state.tweets = [];
    state.done = false;
    renderAll();
    const advance = loadNextInternal();

    let result: SubmitResult;
    try {
      result = await post;
    } catch (err) {
      inflightSubmits.delete(report.report_id);
      await advance;
      await rollback(report.report_id, selection, err);
      try {
        const list = await api.listReports("pending", 1);
        state.counts = pickCounts(list);
        renderCounts();
      } catch {
        // Counts stay optimistic until the next successful request.
      }
      return;
    }
    inflightSubmits.delete(report.report_id);
    await advance;
    state.counts = pickCounts(result);
    renderCounts();
  }

  async function skipInternal(): Promise<void> {
    const report = state.current;
    if (report === null) return;
    try {
      const result = await api.skip(report.report_id, annotatorName());
      state.counts = pickCounts(result);
      renderCounts();
    } catch (err) {
      state.formError = `skip failed: ${errorMessage(err)}`;
      renderFormError();
      return;
    }
    skippedThisSession.add(report.report_id);
    await loadNextInternal();
  }

  function selectLabel(label: Label): void {
    if (state.current === null || state.current.candidates.length === 0) return;
    setChecked("label", label);
  }

  function onKeydown(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target !== null) {
      const tag = target.tagName;
      if (tag === "TEXTAREA") return;
      if (tag === "INPUT") {
        const type = (target as HTMLInputElement).type;
        if (type !== "radio" && type !== "checkbox") return;
      }
    }
    const label = SHORTCUTS[event.key];
    if (label !== undefined) selectLabel(label);
  }

  function onScroll(): void {
    const nearBottom =
      timeline.scrollTop + timeline.clientHeight >= timeline.scrollHeight - 200;
    if (nearBottom) {
      void track(loadMoreTweetsInternal).catch(() => undefined);
    }
  }

  const doc = root.ownerDocument;
  doc.addEventListener("keydown", onKeydown as EventListener);
  timeline.addEventListener("scroll", onScroll);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void track(submitInternal).catch(() => undefined);
  });
  // Direct click binding as well: the optimistic advance clears the current
  // report synchronously, so a click followed by a submit event runs the
  // submission once.
  submitButton.addEventListener("click", (event) => {
    event.preventDefault();
    void track(submitInternal).catch(() => undefined);
  });
  skipButton.addEventListener("click", () => {
    void track(skipInternal).catch(() => undefined);
  });
  retryButton.addEventListener("click", () => {
    const action = retryAction;
    clearBanner();
    if (action !== null) void track(action).catch(() => undefined);
  });

  renderAll();
  void track(refreshInternal).catch(() => undefined);

  return {
    state,
    idle,
    refresh: () => track(refreshInternal),
    loadReport: (reportId: string) =>
      track(async () => {
        try {
          await loadReportInternal(reportId);
        } catch (err) {
          showBanner(
            `failed to load report ${reportId}: ${errorMessage(err)}`,
            () => loadReportInternal(reportId),
          );
        }
      }),
    loadMoreTweets: () => track(loadMoreTweetsInternal),
    submit: () => track(submitInternal),
    skip: () => track(skipInternal),
    selectLabel,
    destroy: () => {
      doc.removeEventListener("keydown", onKeydown as EventListener);
    },
  };
}
