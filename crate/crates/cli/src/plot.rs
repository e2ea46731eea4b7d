//! SVG rendering of a free-space diagram.

use std::fmt::Write as _;

use sfd_core::decider_exact::{decide_exact_with, ExactOptions, ExactState};
use sfd_core::freespace::{reach_membership, FreeCell, ReachableSet};
use sfd_core::geometry::joint_scale;
use sfd_core::Curve2d;

pub struct PlotOptions {
    pub delta: f64,
    /// Overlay the reachable set after this many shortcut rounds.
    pub reach: Option<usize>,
    pub eta: f64,
}

const TARGET_SIZE: usize = 480;
const MARGIN: usize = 10;

pub fn render(t: &Curve2d, b: &Curve2d, opts: &PlotOptions) -> String {
    let (nt, nb) = (t.num_edges(), b.num_edges());
    let px = (TARGET_SIZE / nt.max(nb)).clamp(2, 40);
    let (w, h) = (nt * px, nb * px);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w + 2 * MARGIN,
        h + 2 * MARGIN,
        w + 2 * MARGIN,
        h + 2 * MARGIN
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // Base parameter grows upwards, as in the usual drawing.
    let _ = writeln!(
        svg,
        r#"<g transform="translate({MARGIN},{}) scale(1,-1)">"#,
        h + MARGIN
    );

    let radius = opts.delta + opts.eta * joint_scale(t, b);
    let _ = writeln!(svg, r##"<g fill="#bbbbbb" class="free">"##);
    let side = 1.0 / px as f64;
    for j in 0..nb {
        for i in 0..nt {
            let cell = FreeCell::new(t.edge(i), b.edge(j), i, j, radius);
            if cell.is_empty() {
                continue;
            }
            // A pixel is shaded when any of it is free, so thin bands stay visible.
            raster(&mut svg, i, j, px, |x, y| {
                cell.box_hits_free(
                    x - side / 2.0,
                    x + side / 2.0,
                    y - side / 2.0,
                    y + side / 2.0,
                )
            });
        }
    }
    let _ = writeln!(svg, "</g>");

    if let Some(k) = opts.reach {
        let mut state = ExactState::new(t, b, radius, opts.eta);
        for s in 0..=k {
            state.run_round(s);
        }
        let _ = writeln!(
            svg,
            r##"<g fill="#5b8fd9" fill-opacity="0.7" class="reach">"##
        );
        for j in 0..nb {
            for i in 0..nt {
                let gens = state.generators(k, i, j).iter().map(|g| g.gen).collect();
                let set = ReachableSet::with(state.cell(i, j), gens);
                if set.is_empty() {
                    continue;
                }
                raster(&mut svg, i, j, px, |x, y| reach_membership(&set, (x, y)));
            }
        }
        let _ = writeln!(svg, "</g>");
        let exact = decide_exact_with(
            t,
            b,
            k,
            opts.delta,
            &ExactOptions {
                eta: opts.eta,
                witness: true,
            },
        );
        if let Some(wit) = exact.ok().and_then(|o| o.witness) {
            let _ = writeln!(
                svg,
                r##"<g stroke="#d9534f" stroke-width="1.5" class="tunnels">"##
            );
            for tun in wit.tunnels.iter().filter(|t| t.is_proper()) {
                let gx = |l: sfd_core::CurveLocation<f64>| (l.edge as f64 + l.u) * px as f64;
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                    gx(tun.target_from),
                    gx(tun.base_from),
                    gx(tun.target_to),
                    gx(tun.base_to)
                );
            }
            let _ = writeln!(svg, "</g>");
        }
    }

    let _ = writeln!(
        svg,
        r##"<g stroke="#444444" stroke-width="0.5" fill="none" class="grid">"##
    );
    for i in 0..=nt {
        let _ = writeln!(svg, r#"<line x1="{0}" y1="0" x2="{0}" y2="{h}"/>"#, i * px);
    }
    for j in 0..=nb {
        let _ = writeln!(svg, r#"<line x1="0" y1="{0}" x2="{w}" y2="{0}"/>"#, j * px);
    }
    let _ = writeln!(svg, "</g>\n</g>\n</svg>");
    svg
}

/// Pixel centers of cell `(i, j)` that pass `inside`, merged into
/// horizontal runs.
fn raster(svg: &mut String, i: usize, j: usize, px: usize, inside: impl Fn(f64, f64) -> bool) {
    let at = |p: usize| (p as f64 + 0.5) / px as f64;
    for row in 0..px {
        let y = at(row);
        let mut col = 0;
        while col < px {
            if !inside(at(col), y) {
                col += 1;
                continue;
            }
            let start = col;
            while col < px && inside(at(col), y) {
                col += 1;
            }
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{}" height="1"/>"#,
                i * px + start,
                j * px + row,
                col - start
            );
        }
    }
}
