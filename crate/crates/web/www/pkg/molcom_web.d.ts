/* tslint:disable */
/* eslint-disable */

/**
 * One Monte-Carlo point on the default channel: `[ber, fer, frames, bit_errors]`.
 */
export function ber_point(scheme: string, molecules: number, frames: number, seed: number): Float64Array;

/**
 * Per-slot absorption probabilities P1..Pm over the default 2.1 s window.
 */
export function channel_response(diffusion_coeff: number, tx_distance: number, receiver_radius: number, slot_width: number): Float64Array;

/**
 * LLR of a slot with full ISI history, sampled on `points` counts from 0 to
 * `max_count`.
 */
export function llr_curve(molecules: number, diffusion_coeff: number, tx_distance: number, receiver_radius: number, slot_width: number, max_count: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ber_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly channel_response: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly llr_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
