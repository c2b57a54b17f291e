import { describe, expect, it } from "vitest";

import {
  commandPayload,
  encodeCommand,
  encodeMapUpload,
  encodePlanRun,
  isError,
  parseWire,
  topicIs,
} from "../src/protocol.js";

describe("parseWire", () => {
  it("parses a well-formed gateway frame", () => {
    const msg = parseWire('{"topic":"/pose","seq":3,"payload":{"x_in":1.5}}');
    expect(msg).not.toBeNull();
    expect(topicIs(msg!, "/pose")).toBe(true);
    if (topicIs(msg!, "/pose")) {
      expect(msg.seq).toBe(3);
      expect(msg.payload.x_in).toBe(1.5);
    }
  });

  it("parses error replies", () => {
    const msg = parseWire('{"error":"schema mismatch: nope"}');
    expect(msg).not.toBeNull();
    expect(isError(msg!)).toBe(true);
  });

  it("rejects junk", () => {
    expect(parseWire("{oops")).toBeNull();
    expect(parseWire("42")).toBeNull();
    expect(parseWire('{"topic":"/x"}')).toBeNull();
    expect(parseWire('{"topic":1,"seq":2,"payload":{}}')).toBeNull();
  });
});

describe("encoders", () => {
  it("drive command carries action and steps", () => {
    expect(JSON.parse(encodeCommand("FORWARD"))).toEqual({
      topic: "/drive/cmd",
      payload: { action: "FORWARD", steps: 1 },
    });
  });

  it("stop always publishes zero steps", () => {
    expect(commandPayload("STOP", 5)).toEqual({ action: "STOP", steps: 0 });
  });

  it("map upload and plan run", () => {
    const map = { grid: ["S.", ".G"], start: [0, 0] as [number, number], goal: [1, 1] as [number, number] };
    expect(JSON.parse(encodeMapUpload(map)).topic).toBe("/map");
    expect(JSON.parse(encodePlanRun())).toEqual({ topic: "/plan/run", payload: {} });
  });
});
