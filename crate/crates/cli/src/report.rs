use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use reslab_core::Exponent;
use serde_json::Value;

use crate::args::ReportArgs;
use crate::context::Context;
use crate::error::{usage, CliResult};

const TAIL: [&str; 5] = ["slope", "residual", "class", "in_theorem_region", "in_knapp_region"];

#[derive(Debug, PartialEq)]
pub struct Cell {
    pub p: Exponent,
    pub q: Exponent,
    pub slope: f64,
    pub residual: f64,
    pub class: String,
    pub in_theorem: Option<bool>,
    pub in_knapp: Option<bool>,
}

#[derive(Debug, PartialEq)]
pub struct SweepTable {
    /// Header comment of the artifact, without the leading `#`.
    pub provenance: Option<String>,
    pub x_values: Vec<usize>,
    pub cells: Vec<Cell>,
}

fn flag(s: &str, line: usize) -> CliResult<Option<bool>> {
    match s {
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        "" => Ok(None),
        _ => Err(usage(format!("sweep row {line}: bad flag `{s}`"))),
    }
}

fn number(s: &str, what: &str, line: usize) -> CliResult<f64> {
    s.parse().map_err(|_| usage(format!("sweep row {line}: bad {what} `{s}`")))
}

pub fn parse_sweep(text: &str) -> CliResult<SweepTable> {
    let provenance = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .map(|l| l.trim().to_string());
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| usage(format!("malformed sweep csv: {e}")))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let ok = cols.len() >= 2 + TAIL.len() && cols[0] == "p" && cols[1] == "q" && cols[cols.len() - 5..] == TAIL;
    if !ok {
        return Err(usage(format!("malformed sweep csv header: {}", cols.join(","))));
    }
    let x_values = cols[2..cols.len() - 5]
        .iter()
        .map(|c| c.strip_prefix("norm_X").and_then(|x| x.parse().ok()))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| usage("malformed sweep csv header: norm columns must be norm_X<int>"))?;
    let mut cells = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| usage(format!("malformed sweep csv: {e}")))?;
        let f: Vec<&str> = rec.iter().collect();
        let exp = |s: &str| s.parse::<Exponent>().map_err(|e| usage(format!("sweep row {line}: {e}")));
        let k = f.len() - 5;
        for (j, v) in f[2..k].iter().enumerate() {
            number(v, &format!("norm at X = {}", x_values[j]), line)?;
        }
        let class = f[k + 2].to_string();
        if !["bounded", "growing", "inconclusive"].contains(&class.as_str()) {
            return Err(usage(format!("sweep row {line}: unknown class `{class}`")));
        }
        cells.push(Cell {
            p: exp(f[0])?,
            q: exp(f[1])?,
            slope: number(f[k], "slope", line)?,
            residual: number(f[k + 1], "residual", line)?,
            class,
            in_theorem: flag(f[k + 3], line)?,
            in_knapp: flag(f[k + 4], line)?,
        });
    }
    Ok(SweepTable { provenance, x_values, cells })
}

fn yes_no(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

pub fn render(table: &SweepTable, analysis: Option<&Value>) -> String {
    let mut s = String::new();
    s.push_str("# Restriction sweep report\n\n");
    if let Some(p) = &table.provenance {
        let _ = writeln!(s, "Sweep artifact: `{p}`\n");
    }
    if let Some(a) = analysis {
        s.push_str("## Regularity estimates\n\n| estimate | value |\n|---|---|\n");
        let reg = &a["payload"]["regularity"];
        for key in ["alpha_hat", "beta_hat", "gamma_hat"] {
            let v = reg[key].as_f64().map_or("-".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(s, "| {key} | {v} |");
        }
        s.push('\n');
    }
    s.push_str("## Empirical region\n\n");
    if !table.x_values.is_empty() {
        let xs: Vec<String> = table.x_values.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "Lattice half-widths X = {}.\n", xs.join(", "));
    }
    s.push_str("| p | q | slope | residual | class | theorem region | Knapp region |\n");
    s.push_str("|---|---|---|---|---|---|---|\n");
    for c in &table.cells {
        let _ = writeln!(
            s,
            "| {} | {} | {:.4} | {:.4} | {} | {} | {} |",
            c.p,
            c.q,
            c.slope,
            c.residual,
            c.class,
            yes_no(c.in_theorem),
            yes_no(c.in_knapp)
        );
    }
    if !table.cells.is_empty() {
        let count = |k: &str| table.cells.iter().filter(|c| c.class == k).count();
        let _ = writeln!(
            s,
            "\n{} bounded, {} growing, {} inconclusive.",
            count("bounded"),
            count("growing"),
            count("inconclusive")
        );
        let clash = table
            .cells
            .iter()
            .filter(|c| c.in_theorem == Some(true) && c.class == "growing")
            .count();
        if clash > 0 {
            let _ = writeln!(s, "{clash} cells inside the theorem region were classified as growing.");
        }
    }
    s
}

fn read(ctx: &Context, path: &Path) -> CliResult<String> {
    let p = ctx.input(path);
    fs::read_to_string(&p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))
}

pub fn report(ctx: &Context, a: &ReportArgs) -> CliResult<()> {
    let table = parse_sweep(&read(ctx, &a.sweep)?)?;
    let analysis = match &a.analysis {
        Some(path) => Some(
            serde_json::from_str::<Value>(&read(ctx, path)?)
                .map_err(|e| usage(format!("malformed analysis json: {e}")))?,
        ),
        None => None,
    };
    let md = render(&table, analysis.as_ref());
    match &a.out {
        Some(out) => {
            let path = ctx.write(out, md.as_bytes())?;
            println!("wrote {}", path.display());
        }
        None => print!("{md}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "p,q,norm_X64,norm_X128,slope,residual,class,in_theorem_region,in_knapp_region\n";

    #[test]
    fn header_only_gives_empty_table() {
        let t = parse_sweep(&format!("# seed=1\n{HEADER}")).unwrap();
        assert!(t.cells.is_empty());
        assert_eq!(t.x_values, vec![64, 128]);
        assert_eq!(t.provenance.as_deref(), Some("seed=1"));
        let md = render(&t, None);
        assert!(md.ends_with("|---|---|---|---|---|---|---|\n"));
    }

    #[test]
    fn rows_round_trip() {
        let text = format!("{HEADER}4/3,2,1.5,1.51,0.006,0.001,bounded,true,\n");
        let t = parse_sweep(&text).unwrap();
        assert_eq!(t.cells[0].p, Exponent::new(4, 3));
        assert_eq!(t.cells[0].in_theorem, Some(true));
        assert_eq!(t.cells[0].in_knapp, None);
        assert!(render(&t, None).contains("| 4/3 | 2 | 0.0060 | 0.0010 | bounded | yes | - |"));
    }

    #[test]
    fn malformed_inputs_are_usage_errors() {
        for bad in [
            "".to_string(),
            "a,b\n1,2\n".to_string(),
            format!("{HEADER}4/3,2,1.5,0.006,0.001,bounded,true,\n"),
            format!("{HEADER}4/3,2,1.5,1.51,0.006,0.001,huge,true,\n"),
            format!("{HEADER}x,2,1.5,1.51,0.006,0.001,bounded,true,\n"),
        ] {
            let e = parse_sweep(&bad).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }
}
