/** Proportional scroll synchronization between the two token columns.
 *
 * Both columns are kept at the same relative scroll position, so a token at
 * fraction r of one verse and its link target at fraction r of the other are
 * on screen at the same time regardless of how lopsided the verse pair is.
 */

export interface ScrollMetrics {
    scrollTop: number;
    scrollHeight: number;
    clientHeight: number;
}

/** Where the other column must scroll to mirror `from`'s relative position. */
export function syncedScrollTop(from: ScrollMetrics, to: ScrollMetrics): number {
    const range = from.scrollHeight - from.clientHeight;
    const ratio = range > 0 ? from.scrollTop / range : 0;
    return ratio * Math.max(to.scrollHeight - to.clientHeight, 0);
}

/** Is a point at `offset` (content coordinates) inside the viewport? */
export function visible(metrics: ScrollMetrics, offset: number): boolean {
    return offset >= metrics.scrollTop && offset <= metrics.scrollTop + metrics.clientHeight;
}
