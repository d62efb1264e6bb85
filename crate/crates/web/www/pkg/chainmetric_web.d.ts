/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    chainBall(eps: number, center: number, m: number): Int32Array;
    /**
     * Component index per point at scale `eps`.
     */
    components(eps: number): Uint32Array;
    cover(eps: number, m: number): Uint32Array;
    static fromPoints(xy: Float64Array): Demo;
    constructor(n: number, seed: number);
    /**
     * Flat `[x0, y0, x1, y1, ...]` in the unit square.
     */
    points(): Float64Array;
    readonly isEmpty: boolean;
    readonly len: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_chainBall: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_components: (a: number, b: number) => [number, number, number, number];
    readonly demo_cover: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_fromPoints: (a: number, b: number) => [number, number, number];
    readonly demo_isEmpty: (a: number) => number;
    readonly demo_len: (a: number) => number;
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_points: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
