// Polling state machine for one job, kept pure so the retry behavior and
// progress monotonicity are testable without timers or network.
export function initialPollState(jobId) {
    return {
        jobId,
        phase: "connecting",
        progress: 0,
        error: null,
        consecutiveFailures: 0,
        active: true,
    };
}
/** Apply a successful status response. */
export function onPollSuccess(state, view) {
    return {
        ...state,
        phase: view.state,
        // progress never regresses, even if responses arrive out of order
        progress: Math.max(state.progress, view.progress),
        error: view.error,
        consecutiveFailures: 0,
        active: view.state === "queued" || view.state === "running",
    };
}
/** Apply a network failure: keep state, surface a retriable banner. */
export function onPollFailure(state, message) {
    return {
        ...state,
        phase: "connection-lost",
        error: `connection lost (${message}); retrying`,
        consecutiveFailures: state.consecutiveFailures + 1,
        active: true, // keep retrying; the server may come back
    };
}
/** Backoff: 1s baseline, stretching to 5s while the server is unreachable. */
export function nextPollDelayMs(state) {
    if (state.consecutiveFailures === 0)
        return 1000;
    return Math.min(5000, 1000 * (1 + state.consecutiveFailures));
}
