import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { FixtureApi } from "./fixtureApi.js";

describe("api client", () => {
  it("fetches queue pages with pass and paging parameters", async () => {
    const api = new FixtureApi(20);
    const client = new ApiClient("http://fixture", "r1", api.fetch);
    const page = await client.getQueue("title", 1, 8);
    expect(page.total_pending).toBe(20);
    expect(page.items).toHaveLength(8);
    expect(page.items[0]!.doc_id).toBe("d008");
    // a page beyond the end is empty, not an error
    const far = await client.getQueue("title", 99, 8);
    expect(far.items).toEqual([]);
  });

  it("sends the reviewer header", async () => {
    const api = new FixtureApi(2);
    const client = new ApiClient("http://fixture", "r7", api.fetch);
    await client.postDecision({
      doc_id: "d000", pass: "title", group: 4, reviewer: "r7",
      decision_id: "x-1",
    });
    const page = await client.getQueue("title");
    expect(page.items.map((i) => i.doc_id)).toEqual(["d001"]);
  });

  it("maps error payloads to ApiError", async () => {
    const api = new FixtureApi(2);
    const client = new ApiClient("http://fixture", "r1", api.fetch);
    const attempt = client.postDecision({
      doc_id: "d000", pass: "title", group: 9, reviewer: "r1",
      decision_id: "bad-1",
    });
    await expect(attempt).rejects.toMatchObject({
      name: "ApiError",
      status: 400,
      code: "invalid",
    });
    await expect(
      client.getQueue("skim" as never),
    ).rejects.toBeInstanceOf(ApiError);
  });

  it("propagates network failures as non-ApiError", async () => {
    const api = new FixtureApi(2);
    api.failNextPosts(1);
    const client = new ApiClient("http://fixture", "r1", api.fetch);
    const attempt = client.postDecision({
      doc_id: "d000", pass: "title", group: 4, reviewer: "r1",
      decision_id: "net-1",
    });
    await expect(attempt).rejects.toBeInstanceOf(TypeError);
  });

  it("replaying a decision id returns the original record", async () => {
    const api = new FixtureApi(2);
    const client = new ApiClient("http://fixture", "r1", api.fetch);
    const body = {
      doc_id: "d000", pass: "title" as const, group: 4, reviewer: "r1",
      decision_id: "same-1",
    };
    const first = await client.postDecision(body);
    const second = await client.postDecision(body);
    expect(second.record).toEqual(first.record);
    expect(api.decisions).toHaveLength(1);
  });
});
