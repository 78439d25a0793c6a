/**
 * Frame codec, bit-identical to the Python implementation.
 *
 * Layout (big-endian): "MMPI" magic, version 0x01, type byte, source u32,
 * dest u32, tag u32, payload kind byte, payload length u32, payload bytes.
 * Header is exactly 23 bytes.  U64 arrays are 8-byte big-endian elements;
 * F64 arrays are raw IEEE-754 binary64 bits.
 */

export const MAGIC = Buffer.from("MMPI", "ascii");
export const VERSION = 1;
export const HEADER_LEN = 23;
export const MAX_PAYLOAD = 2 ** 31 - 1;
export const NO_RANK = 0xffffffff;

export enum MsgType {
  HELLO = 1,
  WELCOME = 2,
  START = 3,
  SEND = 4,
  BARRIER = 5,
  BARRIER_RELEASE = 6,
  SHUTDOWN = 7,
  ERROR = 8,
}

export enum PayloadKind {
  EMPTY = 0,
  BYTES = 1,
  U64_ARRAY = 2,
  F64_ARRAY = 3,
}

export type Payload =
  | { kind: PayloadKind.EMPTY }
  | { kind: PayloadKind.BYTES; data: Buffer }
  | { kind: PayloadKind.U64_ARRAY; values: bigint[] }
  | { kind: PayloadKind.F64_ARRAY; values: number[] };

export interface Frame {
  msgType: MsgType;
  source: number;
  dest: number;
  tag: number;
  payload: Payload;
}

export class ProtocolError extends Error {}
export class BadMagic extends ProtocolError {}
export class UnsupportedVersion extends ProtocolError {}
export class UnknownType extends ProtocolError {}
export class UnknownKind extends ProtocolError {}
export class Truncated extends ProtocolError {}
export class LengthMismatch extends ProtocolError {}
export class OversizePayload extends ProtocolError {}

export const empty = (): Payload => ({ kind: PayloadKind.EMPTY });
export const ofBytes = (data: Buffer): Payload => ({ kind: PayloadKind.BYTES, data });
export const u64 = (values: bigint[]): Payload => ({ kind: PayloadKind.U64_ARRAY, values });
export const f64 = (values: number[]): Payload => ({ kind: PayloadKind.F64_ARRAY, values });

function payloadBytes(payload: Payload): Buffer {
  switch (payload.kind) {
    case PayloadKind.EMPTY:
      return Buffer.alloc(0);
    case PayloadKind.BYTES:
      return payload.data;
    case PayloadKind.U64_ARRAY: {
      const buf = Buffer.alloc(8 * payload.values.length);
      payload.values.forEach((v, i) => buf.writeBigUInt64BE(v, 8 * i));
      return buf;
    }
    case PayloadKind.F64_ARRAY: {
      const buf = Buffer.alloc(8 * payload.values.length);
      payload.values.forEach((v, i) => buf.writeDoubleBE(v, 8 * i));
      return buf;
    }
  }
}

function payloadFrom(kind: PayloadKind, data: Buffer): Payload {
  if (kind === PayloadKind.EMPTY) {
    if (data.length > 0) throw new LengthMismatch("EMPTY payload with nonzero length");
    return empty();
  }
  if (kind === PayloadKind.BYTES) return ofBytes(data);
  if (data.length % 8 !== 0) {
    throw new LengthMismatch(`array payload length ${data.length} not a multiple of 8`);
  }
  if (kind === PayloadKind.U64_ARRAY) {
    const values: bigint[] = [];
    for (let i = 0; i < data.length; i += 8) values.push(data.readBigUInt64BE(i));
    return u64(values);
  }
  const values: number[] = [];
  for (let i = 0; i < data.length; i += 8) values.push(data.readDoubleBE(i));
  return f64(values);
}

export function encodeFrame(frame: Frame): Buffer {
  const body = payloadBytes(frame.payload);
  if (body.length > MAX_PAYLOAD) {
    throw new OversizePayload(`payload of ${body.length} bytes exceeds limit`);
  }
  const header = Buffer.alloc(HEADER_LEN);
  MAGIC.copy(header, 0);
  header.writeUInt8(VERSION, 4);
  header.writeUInt8(frame.msgType, 5);
  header.writeUInt32BE(frame.source >>> 0, 6);
  header.writeUInt32BE(frame.dest >>> 0, 10);
  header.writeUInt32BE(frame.tag >>> 0, 14);
  header.writeUInt8(frame.payload.kind, 18);
  header.writeUInt32BE(body.length, 19);
  return Buffer.concat([header, body]);
}

export interface FrameHeader {
  msgType: MsgType;
  source: number;
  dest: number;
  tag: number;
  kind: PayloadKind;
  length: number;
}

export function decodeHeader(buf: Buffer): FrameHeader {
  const probe = buf.subarray(0, 4);
  if (!MAGIC.subarray(0, probe.length).equals(probe)) {
    throw new BadMagic(`expected ${MAGIC.toString("hex")}`);
  }
  if (buf.length >= 5 && buf[4] !== VERSION) {
    throw new UnsupportedVersion(`version ${buf[4]}`);
  }
  if (buf.length < HEADER_LEN) throw new Truncated("incomplete header");
  const rawType = buf.readUInt8(5);
  if (!(rawType in MsgType)) throw new UnknownType(`message type ${rawType}`);
  const rawKind = buf.readUInt8(18);
  if (!(rawKind in PayloadKind)) throw new UnknownKind(`payload kind ${rawKind}`);
  const length = buf.readUInt32BE(19);
  if (length > MAX_PAYLOAD) throw new OversizePayload(`declared ${length} bytes`);
  return {
    msgType: rawType as MsgType,
    source: buf.readUInt32BE(6),
    dest: buf.readUInt32BE(10),
    tag: buf.readUInt32BE(14),
    kind: rawKind as PayloadKind,
    length,
  };
}

/** Decode one frame from the start of buf; returns the bytes consumed. */
export function decodeFrame(buf: Buffer): [Frame, number] {
  const header = decodeHeader(buf.subarray(0, HEADER_LEN));
  const end = HEADER_LEN + header.length;
  if (buf.length < end) throw new Truncated(`need ${end} bytes, have ${buf.length}`);
  const payload = payloadFrom(header.kind, buf.subarray(HEADER_LEN, end));
  return [
    {
      msgType: header.msgType,
      source: header.source,
      dest: header.dest,
      tag: header.tag,
      payload,
    },
    end,
  ];
}
