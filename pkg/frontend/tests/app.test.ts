import { afterEach, describe, expect, test } from "vitest";

import { ApiClient, Candidate, Label, TweetRecord } from "../dist/api.js";
import { App, createApp } from "../dist/app.js";

function cand(pid: string, death: string | null = null): Candidate {
  return {
    person_id: pid,
    name: `Name ${pid}`,
    description: `described ${pid}`,
    birth: "1950-01-01",
    death,
    death_display: death ?? "alive",
  };
}

function tw(id: string, ts: number): TweetRecord {
  return { id, timestamp: ts, text: `RIP somebody ${id}`, user_id: "u1" };
}

interface FakeReportSpec {
  id: string;
  firstDay: string;
  suggested: Label | null;
  candidates: Candidate[];
  tweetPages: TweetRecord[][];
}

function spec(
  id: string,
  firstDay: string,
  suggested: Label | null,
  candidates: Candidate[],
  tweetPages?: TweetRecord[][],
): FakeReportSpec {
  return {
    id,
    firstDay,
    suggested,
    candidates,
    tweetPages: tweetPages ?? [[tw(`${id}-t0`, 1360000000)]],
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** In-memory stand-in for the annotation service, reachable through fetch. */
class FakeService {
  readonly posts: Array<{ reportId: string; payload: Record<string, unknown> }> = [];
  readonly log: string[] = [];
  submitHook: ((payload: Record<string, unknown>) => Promise<Response> | Response) | null =
    null;
  failListsOnce = false;
  private readonly annotated = new Set<string>();

  constructor(private readonly specs: FakeReportSpec[]) {}

  private counts() {
    return {
      total: this.specs.length,
      annotated: this.annotated.size,
      pending: this.specs.length - this.annotated.size,
    };
  }

  private summary(s: FakeReportSpec) {
    return {
      report_id: s.id,
      candidates: s.candidates,
      first_day: s.firstDay,
      day_span: [s.firstDay, s.firstDay],
      tweet_count: s.tweetPages.reduce((n, page) => n + page.length, 0),
      suggested_label: s.suggested,
      status: this.annotated.has(s.id) ? "annotated" : "pending",
      label: null,
      resolved_person_id: null,
    };
  }

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, "http://fake.test");
    const method = init?.method ?? "GET";
    this.log.push(`${method} ${url.pathname}${url.search}`);

    if (method === "GET" && url.pathname === "/api/reports") {
      if (this.failListsOnce) {
        this.failListsOnce = false;
        throw new TypeError("connection refused");
      }
      const status = url.searchParams.get("status") ?? "all";
      let rows = this.specs;
      if (status === "pending") rows = rows.filter((s) => !this.annotated.has(s.id));
      if (status === "annotated") rows = rows.filter((s) => this.annotated.has(s.id));
      return jsonResponse({
        reports: rows.map((s) => this.summary(s)),
        page: 1,
        page_count: 1,
        ...this.counts(),
      });
    }

    const reportMatch = url.pathname.match(/^\/api\/reports\/([^/]+)$/);
    if (method === "GET" && reportMatch !== null) {
      const found = this.specs.find((s) => s.id === reportMatch[1]);
      if (found === undefined) {
        return jsonResponse({ detail: `unknown report: ${reportMatch[1]}` }, 404);
      }
      const page = Number(url.searchParams.get("tweet_page") ?? "1");
      return jsonResponse({
        ...this.summary(found),
        tweets: found.tweetPages[page - 1] ?? [],
        tweet_page: page,
        tweet_page_count: found.tweetPages.length,
      });
    }

    const postMatch = url.pathname.match(/^\/api\/reports\/([^/]+)\/annotation$/);
    if (method === "POST" && postMatch !== null) {
      const payload = JSON.parse(String(init?.body ?? "{}")) as Record<string, unknown>;
      this.posts.push({ reportId: postMatch[1], payload });
      if (this.submitHook !== null) return this.submitHook(payload);
      if (payload.skip === true) {
        return jsonResponse({ ok: true, skipped: true, ...this.counts() });
      }
      this.annotated.add(postMatch[1]);
      return jsonResponse({ ok: true, report_id: postMatch[1], ...this.counts() });
    }

    return jsonResponse({ detail: `no route: ${url.pathname}` }, 404);
  };
}

function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

async function settle(rounds = 6): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

let mounted: { app: App; root: HTMLElement } | null = null;

function mount(fake: FakeService): { app: App; root: HTMLElement } {
  const root = document.createElement("div");
  document.body.append(root);
  const app = createApp(root, new ApiClient("", fake.fetch));
  mounted = { app, root };
  return mounted;
}

afterEach(() => {
  if (mounted !== null) {
    mounted.app.destroy();
    mounted.root.remove();
    mounted = null;
  }
});

function labelInput(root: HTMLElement, value: string): HTMLInputElement {
  const input = root.querySelector<HTMLInputElement>(
    `input[name="label"][value="${value}"]`,
  );
  if (input === null) throw new Error(`no label radio for ${value}`);
  return input;
}

function checkedLabels(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll<HTMLInputElement>('input[name="label"]'))
    .filter((input) => input.checked)
    .map((input) => input.value);
}

describe("label suggestion display", () => {
  test("suggested label is pre-selected and visibly marked", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
      spec("r2", "2013-02-02", "fake", [cand("p2", null)]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    expect(app.state.current?.report_id).toBe("r1");
    expect(checkedLabels(root)).toEqual(["real"]);
    const badges = root.querySelectorAll(".suggested-badge");
    expect(badges.length).toBe(1);
    expect(badges[0].textContent).toBe("suggested");
    expect(badges[0].closest(".label-option")?.getAttribute("data-label")).toBe("real");

    await app.loadReport("r2");
    expect(checkedLabels(root)).toEqual(["fake"]);
    const badge = root.querySelector(".suggested-badge");
    expect(badge?.closest(".label-option")?.getAttribute("data-label")).toBe("fake");
  });

  test("the badge marks the suggestion, not the annotator's choice", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    app.selectLabel("commemoration");
    expect(checkedLabels(root)).toEqual(["commemoration"]);
    const badge = root.querySelector(".suggested-badge");
    expect(badge?.closest(".label-option")?.getAttribute("data-label")).toBe("real");
  });

  test("no suggestion leaves every label unchecked", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", null, [cand("p1"), cand("p2", "2010-05-05")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    expect(checkedLabels(root)).toEqual([]);
    expect(root.querySelector(".suggested-badge")).toBeNull();
  });
});

describe("keyboard shortcuts", () => {
  test("1, 2 and 3 select real, commemoration and fake", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    document.dispatchEvent(new KeyboardEvent("keydown", { key: "2", bubbles: true }));
    expect(checkedLabels(root)).toEqual(["commemoration"]);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "3", bubbles: true }));
    expect(checkedLabels(root)).toEqual(["fake"]);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "1", bubbles: true }));
    expect(checkedLabels(root)).toEqual(["real"]);
  });

  test("keys typed into the annotator field are ignored", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    const annotator = root.querySelector<HTMLInputElement>('[data-role="annotator"]');
    annotator!.dispatchEvent(new KeyboardEvent("keydown", { key: "3", bubbles: true }));
    expect(checkedLabels(root)).toEqual(["real"]);
  });
});

describe("submission", () => {
  test("payload label equals the selected control exactly", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01"), cand("p2")]),
      spec("r2", "2013-02-02", "fake", [cand("p3")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    // Two candidates: none picked automatically, so submitting now must not
    // send anything.
    expect(checkedLabels(root)).toEqual(["real"]);
    await app.submit();
    expect(fake.posts.length).toBe(0);
    const error = root.querySelector<HTMLElement>('[data-role="form-error"]');
    expect(error?.hidden).toBe(false);

    const candidateRadio = root.querySelector<HTMLInputElement>(
      'input[name="candidate"][value="p2"]',
    );
    candidateRadio!.checked = true;
    app.selectLabel("commemoration");
    const picked = checkedLabels(root);
    expect(picked).toEqual(["commemoration"]);
    await app.submit();
    await app.idle();

    expect(fake.posts.length).toBe(1);
    expect(fake.posts[0].reportId).toBe("r1");
    expect(fake.posts[0].payload.label).toBe(picked[0]);
    expect(fake.posts[0].payload.resolved_person_id).toBe("p2");
    expect(fake.posts[0].payload.annotator).toBe("anonymous");
    expect(app.state.current?.report_id).toBe("r2");
  });

  test("advances optimistically, then rolls back on a validation error", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
      spec("r2", "2013-02-02", "fake", [cand("p2")]),
    ]);
    const { app, root } = mount(fake);
    await app.idle();
    expect(app.state.current?.report_id).toBe("r1");

    const gate = deferred<Response>();
    fake.submitHook = () => gate.promise;
    app.selectLabel("commemoration");
    const submission = app.submit();

    // The app moves on while the POST is still in flight.
    await settle();
    expect(app.state.current?.report_id).toBe("r2");

    gate.resolve(jsonResponse({ detail: "label does not match the record" }, 400));
    fake.submitHook = null;
    await submission;
    await app.idle();

    expect(app.state.current?.report_id).toBe("r1");
    const error = root.querySelector<HTMLElement>('[data-role="form-error"]');
    expect(error?.hidden).toBe(false);
    expect(error?.textContent).toContain("label does not match the record");
    expect(checkedLabels(root)).toEqual(["commemoration"]);
    const candidate = root.querySelector<HTMLInputElement>('input[name="candidate"]');
    expect(candidate?.checked).toBe(true);
    expect(candidate?.disabled).toBe(false);
  });

  test("skip posts a skip marker and moves on without annotating", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
      spec("r2", "2013-02-02", "fake", [cand("p2")]),
    ]);
    const { app } = mount(fake);
    await app.idle();

    await app.skip();
    await app.idle();
    expect(fake.posts.length).toBe(1);
    expect(fake.posts[0].payload.skip).toBe(true);
    expect(fake.posts[0].payload.label).toBeUndefined();
    expect(app.state.current?.report_id).toBe("r2");

    // The skipped report stays pending on the server but is not shown again
    // this session.
    await app.skip();
    await app.idle();
    expect(app.state.done).toBe(true);
    expect(app.state.current).toBeNull();
  });
});

describe("tweet timeline", () => {
  test("infinite scroll appends pages in order and stops at the last page", async () => {
    const pages = [
      [tw("a0", 1000), tw("a1", 1030), tw("a2", 1060)],
      [tw("b0", 1090), tw("b1", 1120)],
      [tw("c0", 1150)],
    ];
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")], pages),
    ]);
    const { app, root } = mount(fake);
    await app.idle();

    const ids = () =>
      Array.from(root.querySelectorAll<HTMLElement>(".tweet")).map(
        (item) => item.dataset.tweetId,
      );
    expect(ids()).toEqual(["a0", "a1", "a2"]);

    await app.loadMoreTweets();
    expect(ids()).toEqual(["a0", "a1", "a2", "b0", "b1"]);
    await app.loadMoreTweets();
    expect(ids()).toEqual(["a0", "a1", "a2", "b0", "b1", "c0"]);

    const fetchesBefore = fake.log.length;
    await app.loadMoreTweets();
    expect(fake.log.length).toBe(fetchesBefore);

    const times = Array.from(root.querySelectorAll(".tweet time")).map(
      (node) => node.textContent ?? "",
    );
    expect(times.length).toBe(6);
    expect([...times].sort()).toEqual(times);
    expect(times[0]).toMatch(/^\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2} UTC$/);
  });

  test("a failed list fetch shows a retry banner and retry recovers", async () => {
    const fake = new FakeService([
      spec("r1", "2013-02-01", "real", [cand("p1", "2013-02-01")]),
    ]);
    fake.failListsOnce = true;
    const { app, root } = mount(fake);
    await app.idle();

    const banner = root.querySelector<HTMLElement>('[data-role="banner"]');
    expect(banner?.hidden).toBe(false);
    expect(banner?.textContent).toContain("failed to load");
    expect(app.state.current).toBeNull();

    root.querySelector<HTMLButtonElement>('[data-role="retry"]')!.click();
    await app.idle();
    expect(banner?.hidden).toBe(true);
    expect(app.state.current?.report_id).toBe("r1");
  });
});

describe("degenerate reports", () => {
  test("an empty candidate list disables the form and explains why", async () => {
    const fake = new FakeService([spec("r1", "2013-02-01", null, [])]);
    const { app, root } = mount(fake);
    await app.idle();

    const submit = root.querySelector<HTMLButtonElement>('[data-role="submit"]');
    expect(submit?.disabled).toBe(true);
    for (const input of Array.from(
      root.querySelectorAll<HTMLInputElement>('input[name="label"]'),
    )) {
      expect(input.disabled).toBe(true);
    }
    const message = root.querySelector<HTMLElement>('[data-role="form-message"]');
    expect(message?.hidden).toBe(false);
    expect(message?.textContent).toContain("no candidate entities");

    await app.submit();
    expect(fake.posts.length).toBe(0);
  });
});
