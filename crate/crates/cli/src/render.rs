//! Text and LaTeX views of the records. JSON output serializes the records
//! directly; these views are for reading.

use std::fmt::Write;

use crate::artifact::{OperatorRecord, SpectralRecord, TailRecord, TransformRecord, VerifyRecord};

pub fn transform_text(r: &TransformRecord) -> String {
    let mut s = String::new();
    let o = &r.orders;
    let _ = writeln!(s, "transform: N={} n={} D={} M={} K={}", r.n_reduction, r.conditions, o.d, o.m, o.k);
    let _ = writeln!(s, "g = {}", r.g.text);
    let _ = writeln!(s, "f = {}", r.f.as_ref().map_or("(forward-only)", |p| &p.text));
    let _ = writeln!(s, "h = {}", r.h.text);
    let _ = writeln!(s, "P = {}", r.p.text);
    let _ = writeln!(s, "Q = {}", op_text(r.q.as_ref()));
    let _ = writeln!(s, "L_V = {}", op_text(r.l_v.as_ref()));
    let _ = writeln!(s, "L_W = {}", op_text(r.l_w.as_ref()));
    let norm = if r.tau.normalized { "" } else { "  (unnormalized)" };
    let _ = writeln!(s, "tau_W = {}{norm}", r.tau.closed_form);
    if let Some(ser) = &r.tau.series {
        let _ = writeln!(s, "tau_W series = {} + O(w>{})", ser.text, ser.weight_bound);
    }
    if let Some(t) = &r.psi_tail {
        s.push_str(&tail_text(t));
    }
    if let Some(i) = &r.inclusion {
        let _ = writeln!(s, "{i}");
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn op_text(op: Option<&OperatorRecord>) -> &str {
    op.map_or("(not available)", |o| &o.text)
}

fn tail_text(t: &TailRecord) -> String {
    let mut s = String::from("Psi_W tail:\n");
    for c in &t.coeffs {
        let _ = writeln!(s, "  z^{}: {}", c.power, c.series.text);
    }
    let _ = writeln!(s, "  + O(z^{})", t.low - 1);
    s
}

pub fn spectral_text(r: &SpectralRecord) -> String {
    let mut s = String::new();
    let basis: Vec<&str> = r.basis.iter().map(|p| p.text.as_str()).collect();
    let _ = writeln!(s, "A_W up to degree {}: {{{}}}", r.deg_bound, basis.join(", "));
    if r.empty {
        let _ = writeln!(s, "rank: undetermined (no nonconstant element within the bound)");
    } else {
        let _ = writeln!(s, "rank: {}", r.rank);
    }
    for op in &r.operators {
        let _ = writeln!(s, "L[{}] = {}", op.u.text, op.op.text);
    }
    s
}

pub fn verify_text(r: &VerifyRecord) -> String {
    let mut s = String::new();
    for rep in &r.reports {
        let _ = writeln!(s, "{rep}");
    }
    let _ = writeln!(s, "{} of {} checks failed", r.failures, r.reports.len());
    s
}

/// Presentation-only rewrite of the plain-text formulas.
pub fn latex(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    let word_at = |i: usize, w: &str| chars[i..].iter().take(w.len()).copied().eq(w.chars());
    let digits = |mut j: usize| {
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        let prev_alpha = i > 0 && chars[i - 1].is_ascii_alphabetic();
        if word_at(i, "zeta") {
            let j = digits(i + 4);
            out.push_str(&format!("\\zeta_{{{}}}", chars[i + 4..j].iter().collect::<String>()));
            i = j;
        } else if word_at(i, "exp(") {
            out.push_str("\\exp(");
            i += 4;
        } else if c == '^' {
            let start = i + 1;
            let j = if chars.get(start) == Some(&'-') { digits(start + 1) } else { digits(start) };
            out.push_str(&format!("^{{{}}}", chars[start..j].iter().collect::<String>()));
            i = j;
        } else if c == 't' && !prev_alpha && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            let j = digits(i + 1);
            out.push_str(&format!("t_{{{}}}", chars[i + 1..j].iter().collect::<String>()));
            i = j;
        } else if c == 'D' && !prev_alpha && !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphabetic()) {
            out.push_str("\\partial");
            i += 1;
        } else if c == '*' {
            out.push_str(" \\, ");
            i += 1;
        } else {
            out.push(c);
            i += 1;
        }
    }
    out.replace("+ -", "- ")
}

pub fn transform_latex(r: &TransformRecord) -> String {
    let mut rows = vec![
        format!("g &= {}", latex(&r.g.text)),
        format!("h &= {}", latex(&r.h.text)),
        format!("P &= {}", latex(&r.p.text)),
        format!("\\tau_W &= {}", latex(&r.tau.closed_form)),
    ];
    if let Some(f) = &r.f {
        rows.insert(1, format!("f &= {}", latex(&f.text)));
    }
    if let Some(q) = &r.q {
        rows.push(format!("Q &= {}", latex(&q.text)));
    }
    if let Some(ser) = &r.tau.series {
        rows.push(format!("\\tau_W &= {} + O(w^{{{}}})", latex(&ser.text), ser.weight_bound + 1));
    }
    if let Some(t) = &r.psi_tail {
        let terms: Vec<String> =
            t.coeffs.iter().map(|c| format!("({}) z^{{{}}}", latex(&c.series.text), c.power)).collect();
        rows.push(format!("\\Psi_W e^{{-\\xi}} &= {} + O(z^{{{}}})", terms.join(" + "), t.low - 1));
    }
    align(&rows)
}

pub fn spectral_latex(r: &SpectralRecord) -> String {
    let basis: Vec<String> = r.basis.iter().map(|p| latex(&p.text)).collect();
    let mut rows = vec![format!("\\mathcal{{A}}_W &\\supseteq \\{{{}\\}}", basis.join(",\\ ")), format!("\\mathrm{{rank}} &= {}", r.rank)];
    for op in &r.operators {
        rows.push(format!("L_{{{}}} &= {}", latex(&op.u.text), latex(&op.op.text)));
    }
    align(&rows)
}

pub fn verify_latex(r: &VerifyRecord) -> String {
    let mut s = String::from("\\begin{tabular}{lll}\n");
    for rep in &r.reports {
        let v = if rep.verdict.is_fail() { "fail" } else if rep.verdict.is_pass() { "pass" } else { "skipped" };
        let _ = writeln!(s, "{} & {} & {} \\\\", rep.name.replace('_', "\\_"), v, rep.tested);
    }
    s.push_str("\\end{tabular}\n");
    s
}

fn align(rows: &[String]) -> String {
    format!("\\begin{{align*}}\n{}\n\\end{{align*}}\n", rows.join(" \\\\\n"))
}

#[cfg(test)]
mod tests {
    use super::latex;

    #[test]
    fn latex_rewrites_tokens() {
        assert_eq!(latex("2*t1^3 + -1*zeta3"), "2 \\, t_{1}^{3} - 1 \\, \\zeta_{3}");
        assert_eq!(latex("D^2 + -2*D"), "\\partial^{2} - 2 \\, \\partial");
        assert_eq!(latex("exp(2*t1)"), "\\exp(2 \\, t_{1})");
    }
}
