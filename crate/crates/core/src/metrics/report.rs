//! Serialization of metric results.
//!
//! Three renderings share one [`MetricReport`]: flat `key=value` lines, a
//! comma-separated table with one row per window, and a human-readable
//! mean/std summary. Missing inputs simply omit their keys and rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::tracks::{DetectionUtility, TrackMetric};
use super::windowed::{WindowDensity, WindowedMetric};
use super::Aggregate;

pub const WINDOWS_CSV_HEADER: &str =
    "window,t_start_us,t_end_us,events_a,events_b,density_a_per_ms,density_b_per_ms,stcd,emd";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    /// Resolved configuration, written first under the `config.` prefix.
    pub config: Vec<(String, String)>,
    pub stcd: Option<WindowedMetric>,
    pub emd: Option<WindowedMetric>,
    pub density: Vec<WindowDensity>,
    pub identity_similarity: Option<TrackMetric>,
    /// Stability of the source identity track.
    pub temporal_stability_src: Option<TrackMetric>,
    /// Stability of the generated identity track.
    pub temporal_stability_gen: Option<TrackMetric>,
    pub pose_error: Option<TrackMetric>,
    pub mimicry_error: Option<TrackMetric>,
    /// Detections on reconstructed intensity frames.
    pub detection: Option<DetectionUtility>,
    /// Detections on event representations.
    pub event_detection: Option<DetectionUtility>,
}

struct Lines(String);

impl Lines {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}={value}");
    }

    fn aggregate(&mut self, prefix: &str, agg: Option<&Aggregate>) {
        match agg {
            Some(a) => {
                self.put(&format!("{prefix}.mean"), a.mean);
                self.put(&format!("{prefix}.std"), a.std);
                self.put(&format!("{prefix}.count"), a.count);
            }
            None => self.put(&format!("{prefix}.count"), 0),
        }
    }

    fn windowed(&mut self, prefix: &str, m: &WindowedMetric) {
        self.aggregate(prefix, Some(&m.aggregate));
        self.put(&format!("{prefix}.windows"), m.windows.len());
        self.put(&format!("{prefix}.skipped"), m.skipped);
    }

    fn track(&mut self, prefix: &str, m: &TrackMetric) {
        self.aggregate(prefix, m.aggregate.as_ref());
        self.put(&format!("{prefix}.unmatched"), m.unmatched);
        self.put(&format!("{prefix}.invalid"), m.invalid);
    }
}

impl MetricReport {
    /// Flat `key=value` text, one entry per line, in a fixed key order.
    /// Floating-point values use the shortest representation that parses
    /// back to the same number.
    pub fn to_key_values(&self) -> String {
        let mut out = Lines(String::new());
        for (k, v) in &self.config {
            out.put(&format!("config.{k}"), v);
        }
        if let Some(m) = &self.stcd {
            out.windowed("stcd", m);
        }
        if let Some(m) = &self.emd {
            out.windowed("emd", m);
        }
        if !self.density.is_empty() {
            let a: Vec<f64> = self.density.iter().map(|d| d.rate_a_per_ms).collect();
            let b: Vec<f64> = self.density.iter().map(|d| d.rate_b_per_ms).collect();
            out.aggregate("density_a_per_ms", Aggregate::of(&a).as_ref());
            out.aggregate("density_b_per_ms", Aggregate::of(&b).as_ref());
        }
        let tracks = [
            ("identity_similarity", &self.identity_similarity),
            ("temporal_stability_src", &self.temporal_stability_src),
            ("temporal_stability_gen", &self.temporal_stability_gen),
            ("pose_error_deg", &self.pose_error),
            ("mimicry_error", &self.mimicry_error),
        ];
        for (prefix, m) in tracks {
            if let Some(m) = m {
                out.track(prefix, m);
            }
        }
        if let Some(d) = &self.detection {
            out.aggregate("det_conf_ref", d.confidence_ref.as_ref());
            out.aggregate("det_conf_anon", d.confidence_anon.as_ref());
            out.aggregate("det_iou", d.iou.as_ref());
            out.put("det_rate_ref", d.rate_ref);
            out.put("det_rate_anon", d.rate_anon);
            out.put("det_rate_error", d.rate_error);
        }
        if let Some(d) = &self.event_detection {
            out.aggregate("event_conf_ref", d.confidence_ref.as_ref());
            out.aggregate("event_conf_anon", d.confidence_anon.as_ref());
            out.aggregate("event_iou", d.iou.as_ref());
            out.put("event_rate_ref", d.rate_ref);
            out.put("event_rate_anon", d.rate_anon);
            out.put("event_rate_error", d.rate_error);
        }
        out.0
    }

    /// One row per window under [`WINDOWS_CSV_HEADER`]. Skipped windows and
    /// metrics that were not computed leave their cells empty.
    pub fn windows_csv(&self) -> String {
        #[derive(Default)]
        struct Row {
            events: Option<(usize, usize)>,
            density: Option<(f64, f64)>,
            stcd: Option<f64>,
            emd: Option<f64>,
        }
        let mut rows: BTreeMap<(u64, u64), Row> = BTreeMap::new();
        for d in &self.density {
            let r = rows.entry((d.window.start, d.window.end)).or_default();
            r.events = Some((d.events_a, d.events_b));
            r.density = Some((d.rate_a_per_ms, d.rate_b_per_ms));
        }
        for (metric, is_stcd) in [(&self.stcd, true), (&self.emd, false)] {
            for s in metric.iter().flat_map(|m| &m.windows) {
                let r = rows.entry((s.window.start, s.window.end)).or_default();
                r.events = Some((s.events_a, s.events_b));
                if is_stcd {
                    r.stcd = s.value;
                } else {
                    r.emd = s.value;
                }
            }
        }
        let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut out = String::from(WINDOWS_CSV_HEADER);
        out.push('\n');
        for (i, ((start, end), r)) in rows.into_iter().enumerate() {
            let (na, nb) = match r.events {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{i},{start},{end},{na},{nb},{},{},{},{}",
                cell(r.density.map(|d| d.0)),
                cell(r.density.map(|d| d.1)),
                cell(r.stcd),
                cell(r.emd),
            );
        }
        out
    }

    /// Mean/std table grouped like the published results: identity,
    /// utility and event-space structure.
    pub fn summary_table(&self) -> String {
        let mut rows: Vec<(&str, Option<Aggregate>)> = Vec::new();
        let agg = |m: &Option<TrackMetric>| m.as_ref().map(|m| m.aggregate);
        let mut identity = Vec::new();
        if self.identity_similarity.is_some() {
            identity.push(("Identity similarity", agg(&self.identity_similarity).flatten()));
        }
        if self.temporal_stability_src.is_some() {
            identity.push(("Temporal stability (src)", agg(&self.temporal_stability_src).flatten()));
        }
        if self.temporal_stability_gen.is_some() {
            identity.push(("Temporal stability (gen)", agg(&self.temporal_stability_gen).flatten()));
        }
        if self.pose_error.is_some() {
            identity.push(("Pose error (deg)", agg(&self.pose_error).flatten()));
        }
        if self.mimicry_error.is_some() {
            identity.push(("Mimicry error", agg(&self.mimicry_error).flatten()));
        }
        rows.extend(identity);
        if let Some(d) = &self.detection {
            rows.push(("YOLO confidence (ref)", d.confidence_ref));
            rows.push(("YOLO confidence (anon)", d.confidence_anon));
            rows.push(("YOLO IoU", d.iou));
            rows.push(("Detection rate error", Some(single(d.rate_error))));
        }
        if let Some(d) = &self.event_detection {
            rows.push(("Event confidence (ref)", d.confidence_ref));
            rows.push(("Event confidence (anon)", d.confidence_anon));
            rows.push(("Event IoU", d.iou));
            rows.push(("Event detection rate error", Some(single(d.rate_error))));
        }
        if let Some(m) = &self.stcd {
            rows.push(("STCD", Some(m.aggregate)));
        }
        if let Some(m) = &self.emd {
            rows.push(("EMD", Some(m.aggregate)));
        }

        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}  {:>6}", "metric", "mean", "std", "n");
        for (name, a) in rows {
            match a {
                Some(a) => {
                    let _ = writeln!(
                        out,
                        "{name:<width$}  {:>10.4}  {:>10.4}  {:>6}",
                        a.mean, a.std, a.count
                    );
                }
                None => {
                    let _ = writeln!(out, "{name:<width$}  {:>10}  {:>10}  {:>6}", "-", "-", 0);
                }
            }
        }
        out
    }
}

fn single(v: f64) -> Aggregate {
    Aggregate {
        mean: v,
        std: 0.0,
        count: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::TimeWindow;
    use crate::metrics::WindowScore;

    fn windowed(values: &[Option<f64>]) -> WindowedMetric {
        let windows: Vec<WindowScore> = values
            .iter()
            .enumerate()
            .map(|(i, &value)| WindowScore {
                window: TimeWindow::new(i as u64 * 100, i as u64 * 100 + 200).unwrap(),
                events_a: 3,
                events_b: 4,
                value,
            })
            .collect();
        let vals: Vec<f64> = values.iter().flatten().copied().collect();
        WindowedMetric {
            skipped: values.len() - vals.len(),
            windows,
            aggregate: Aggregate::of(&vals).unwrap(),
        }
    }

    #[test]
    fn key_values_omit_missing_sections() {
        let report = MetricReport {
            config: vec![("window_us".into(), "50000".into())],
            stcd: Some(windowed(&[Some(0.25), None, Some(0.75)])),
            ..Default::default()
        };
        let text = report.to_key_values();
        assert_eq!(
            text,
            "config.window_us=50000\nstcd.mean=0.5\nstcd.std=0.25\nstcd.count=2\n\
             stcd.windows=3\nstcd.skipped=1\n"
        );
        assert!(!text.contains("emd"));
    }

    #[test]
    fn detection_keys_present() {
        let util = DetectionUtility {
            confidence_ref: Some(single(0.9)),
            confidence_anon: None,
            iou: Some(single(1.0 / 3.0)),
            rate_ref: 1.0,
            rate_anon: 0.5,
            rate_error: 0.5,
        };
        let report = MetricReport {
            detection: Some(util.clone()),
            event_detection: Some(util),
            ..Default::default()
        };
        let text = report.to_key_values();
        for key in ["det_iou.mean=", "det_iou.std=", "det_rate_error=0.5", "event_iou.mean=", "det_conf_anon.count=0"] {
            assert!(text.contains(key), "{key} missing");
        }
        let table = report.summary_table();
        assert!(table.contains("YOLO IoU") && table.contains("Event IoU"));
        assert!(table.contains("0.3333"));
    }

    #[test]
    fn windows_csv_rows() {
        let report = MetricReport {
            stcd: Some(windowed(&[Some(0.5), None])),
            emd: Some(windowed(&[Some(0.125), None])),
            ..Default::default()
        };
        let csv = report.windows_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], WINDOWS_CSV_HEADER);
        assert_eq!(lines[1], "0,0,200,3,4,,,0.5,0.125");
        assert_eq!(lines[2], "1,100,300,3,4,,,,");
    }
}
