//! SVG drawings of a domain, optionally with one source's shortest path map
//! and a path. Presentation only.

use crate::domain::PolygonalDomain;
use crate::geom::Point;
use crate::spm::SpmRegion;
use std::fmt::Write;

/// Points per far-boundary polyline of a region.
const FAR_SAMPLES: usize = 24;

fn ring_points(r: &[Point]) -> String {
    r.iter().map(|p| format!("{:.6},{:.6}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

/// Hue spread by the golden angle so neighbouring apexes differ.
fn apex_color(apex: usize) -> String {
    format!("hsl({:.1},65%,72%)", (apex as f64 * 137.507_764) % 360.0)
}

fn region_outline(r: &SpmRegion) -> Vec<Point> {
    let mut pts = vec![r.apex_point];
    for k in 0..=FAR_SAMPLES {
        let th = r.theta0 + (r.theta1 - r.theta0) * k as f64 / FAR_SAMPLES as f64;
        pts.push(r.far_point(th));
    }
    pts
}

pub fn render(d: &PolygonalDomain, regions: &[SpmRegion], path: Option<&[Point]>) -> String {
    let bb = d.bbox();
    let (w, h) = (bb.max.x - bb.min.x, bb.max.y - bb.min.y);
    let pad = 0.03 * w.max(h);
    let stroke = 0.004 * w.max(h);
    let mut s = String::new();
    // The y axis is flipped so the drawing has the usual orientation.
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\" width=\"800\" height=\"{:.0}\">",
        bb.min.x - pad,
        -bb.max.y - pad,
        w + 2.0 * pad,
        h + 2.0 * pad,
        800.0 * (h + 2.0 * pad) / (w + 2.0 * pad)
    );
    let _ = writeln!(s, "<g transform=\"scale(1,-1)\" stroke-width=\"{stroke:.6}\" stroke-linejoin=\"round\">");
    let _ = writeln!(s, "<polygon points=\"{}\" fill=\"#f4f4f4\" stroke=\"#222\"/>", ring_points(&d.outer));
    for r in regions {
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.8\" stroke=\"#666\" stroke-width=\"{:.6}\"/>",
            ring_points(&region_outline(r)),
            apex_color(r.apex),
            0.3 * stroke
        );
    }
    for hole in &d.holes {
        let _ = writeln!(s, "<polygon points=\"{}\" fill=\"#555\" stroke=\"#222\"/>", ring_points(hole));
    }
    if let Some(p) = path {
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-width=\"{:.6}\"/>",
            ring_points(p),
            2.0 * stroke
        );
        for q in p.first().into_iter().chain(p.last()) {
            let _ = writeln!(s, "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"#c00\"/>", q.x, q.y, 3.0 * stroke);
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::Geodesic;
    use crate::spm::build_spm;

    #[test]
    fn draws_domain_regions_and_path() {
        let p = Point::new;
        let d = PolygonalDomain::new(
            vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)],
            vec![vec![p(4., 4.), p(4., 6.), p(6., 6.), p(6., 4.)]],
        );
        let g = Geodesic::new(d.clone()).unwrap();
        let regions = build_spm(&g, 0);
        let path = [p(1., 5.), p(4., 6.), p(6., 6.), p(9., 5.)];
        let out = render(&d, &regions, Some(&path));
        assert!(out.starts_with("<svg"));
        assert_eq!(out.matches("<polygon").count(), 2 + regions.len());
        assert_eq!(out.matches("<polyline").count(), 1);
        assert_eq!(out, render(&d, &regions, Some(&path)));
    }
}
