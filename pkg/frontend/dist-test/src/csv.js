// CSV export of result arrays. The numbers come straight from the API
// payload (the UI never recomputes estimates or errors); serialization uses
// the shortest round-trippable form so re-parsing reproduces them exactly.
function fmt(x) {
    return Object.is(x, -0) ? "0" : String(x);
}
export function resultToCsv(result) {
    const dim = result.dim;
    const header = ["tau"];
    for (let d = 1; d <= dim; d++)
        header.push(`x${d}`);
    for (let d = 1; d <= dim; d++)
        header.push(`xhat${d}`);
    header.push("err");
    const lines = [header.join(",")];
    for (let k = 0; k < result.tau.length; k++) {
        const row = [fmt(result.tau[k])];
        for (let d = 0; d < dim; d++) {
            row.push(result.truth ? fmt(result.truth[k][d]) : "");
        }
        for (let d = 0; d < dim; d++) {
            row.push(fmt(result.estimates[k][d]));
        }
        row.push(result.error ? fmt(result.error[k]) : "");
        lines.push(row.join(","));
    }
    return lines.join("\n") + "\n";
}
export function parseCsv(text) {
    const lines = text.trim().split("\n");
    const header = lines[0].split(",");
    const rows = lines.slice(1).map((line) => line.split(",").map(Number));
    return { header, rows };
}
