//! Text tables and plottable series.

use crate::eval::RunMetrics;

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = (0..cols)
            .map(|i| format!("{:<w$}", cells.get(i).map_or("", String::as_str), w = width[i]))
            .collect();
        format!("| {} |\n", parts.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

/// One row per run; rates in percent.
pub fn metrics_table(runs: &[RunMetrics]) -> String {
    let header: Vec<String> = ["run", "pairs", "exact %", "token %", "P %", "R %", "F1 %"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|m| {
            vec![
                m.label.clone(),
                m.pairs.to_string(),
                pct(m.exact_match),
                pct(m.token_accuracy),
                pct(m.precision),
                pct(m.recall),
                pct(m.f1),
            ]
        })
        .collect();
    render(&header, &rows)
}

/// Exact match of models trained on `train_domains` (rows) tested on
/// `test_domains` (columns); in-domain cells are starred.
pub fn transfer_table(train_domains: &[String], test_domains: &[String], exact: &[Vec<f64>]) -> String {
    let mut header = vec!["train \\ test".to_string()];
    header.extend(test_domains.iter().cloned());
    let rows: Vec<Vec<String>> = train_domains
        .iter()
        .zip(exact)
        .map(|(a, cells)| {
            let mut row = vec![a.clone()];
            for (b, &x) in test_domains.iter().zip(cells) {
                let mark = if a == b { "*" } else { "" };
                row.push(format!("{}{mark}", pct(x)));
            }
            row
        })
        .collect();
    render(&header, &rows)
}

/// Tab-separated (run, epoch, train_loss, valid_loss, valid_exact_match).
pub fn plot_series(runs: &[RunMetrics]) -> String {
    let mut out = String::from("run\tepoch\ttrain_loss\tvalid_loss\tvalid_exact_match\n");
    for m in runs {
        for r in &m.loss_curve {
            let train = r.train_loss.map_or("nan".to_string(), |x| x.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                m.label, r.epoch, train, r.valid_loss, r.valid_exact_match
            ));
        }
    }
    out
}
