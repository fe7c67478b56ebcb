//! wasm-bindgen bindings for the browser page in `www/`. Every export returns JSON text
//! or an error message, so the same functions run natively in tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use iofpar::canonical::canonical_word;
use iofpar::monoid::{enumerate_monoid, is_member_prop1};
use iofpar::normalform::count_wn;
use iofpar::rewriter::Rewriter;
use iofpar::{Limits, PartialInjection, Word};

/// Largest n the page accepts; keeps enumeration and rewriting interactive.
pub const DEMO_MAX_N: usize = 9;

fn limits() -> Limits {
    Limits { max_n: DEMO_MAX_N }
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Normalized {
    input: String,
    normal_form: String,
    steps: Vec<String>,
    map: String,
    svg: String,
}

/// Rewrite `word` to normal form, with one line per rule application.
#[wasm_bindgen]
pub fn normalize(n: usize, word: &str) -> Result<String, String> {
    limits().check(n).map_err(|e| e.to_string())?;
    let w: Word = word.parse().map_err(|e: iofpar::Error| e.to_string())?;
    let (nf, trace) = Rewriter::new(n).and_then(|rw| rw.normalize(&w)).map_err(|e| e.to_string())?;
    let f = w.evaluate(n).map_err(|e| e.to_string())?;
    json(&Normalized {
        input: w.to_string(),
        normal_form: nf.render().to_string(),
        steps: trace.steps.iter().map(|s| s.to_string()).collect(),
        map: f.to_string(),
        svg: diagram(&f),
    })
}

#[derive(Serialize)]
struct Inspected {
    map: String,
    member: bool,
    failed_condition: Option<String>,
    normal_form: Option<String>,
    svg: String,
}

/// Membership, the failed condition if any, and the canonical word of a map like `1->3, 2->4`.
#[wasm_bindgen]
pub fn inspect(n: usize, map: &str) -> Result<String, String> {
    limits().check(n).map_err(|e| e.to_string())?;
    let f = PartialInjection::parse_pairs(n, map).map_err(|e| e.to_string())?;
    let r = is_member_prop1(&f);
    let normal_form = if !r.is_member {
        None
    } else if f.is_empty_map() {
        Some(Word::v_range(1, n).to_string())
    } else {
        Some(canonical_word(&f, n).map_err(|e| e.to_string())?.render().to_string())
    };
    json(&Inspected {
        map: f.to_string(),
        member: r.is_member,
        failed_condition: r.failed_condition.map(|c| c.to_string()),
        normal_form,
        svg: diagram(&f),
    })
}

#[derive(Serialize)]
struct Count {
    n: usize,
    monoid_size: usize,
    wn_size: usize,
}

/// Monoid size and number of normal forms for n.
#[wasm_bindgen]
pub fn count(n: usize) -> Result<String, String> {
    let l = limits();
    let monoid_size = enumerate_monoid(n, &l).map_err(|e| e.to_string())?.len();
    let wn_size = count_wn(n, &l).map_err(|e| e.to_string())?;
    json(&Count { n, monoid_size, wn_size })
}

/// Two rows of points, domain above and image below, joined by the map's arrows.
/// The zig-zag under each row is the fence order; odd points sit low.
pub fn diagram(f: &PartialInjection) -> String {
    let n = f.n();
    let (dx, w) = (44.0, 44.0 * (n as f64 + 1.0));
    let x = |p: usize| dx * p as f64;
    let row = |base: f64, p: usize| if p % 2 == 1 { base + 8.0 } else { base - 8.0 };
    let (top, bottom) = (40.0, 160.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} 200\" width=\"{w}\" height=\"200\">"
    );
    for base in [top, bottom] {
        let pts: Vec<String> = (1..=n).map(|p| format!("{},{}", x(p), row(base, p))).collect();
        s.push_str(&format!("<polyline points=\"{}\" fill=\"none\" stroke=\"#bbb\"/>", pts.join(" ")));
    }
    for (a, b) in f.pairs() {
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2a6\" stroke-width=\"2\"/>",
            x(a),
            row(top, a),
            x(b),
            row(bottom, b)
        ));
    }
    for p in 1..=n {
        for (base, set, dy) in [(top, f.domain(), -14.0), (bottom, f.image_set(), 24.0)] {
            let fill = if set.contains(p) { "#2a6" } else { "#fff" };
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{fill}\" stroke=\"#333\"/>\
                 <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{p}</text>",
                x(p),
                row(base, p),
                x(p),
                row(base, p) + dy
            ));
        }
    }
    s.push_str("</svg>");
    s
}
