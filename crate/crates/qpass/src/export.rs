//! CSV tables written by the pipeline.

use std::io::Write;

use qpass_core::qpass::CdfReport;
use qpass_core::{Clustering, FieldValues, PlayerRanking, QPassRecord, TransitionSystem};

type CsvResult = csv::Result<()>;

fn num(v: f64) -> String {
    format!("{v}")
}

/// Centroids in raw units, one row per cluster.
pub fn write_partition<W: Write>(writer: W, clustering: &Clustering) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["cluster_id", "x_centroid", "y_centroid", "f_centroid"])?;
    for k in 0..clustering.c() {
        let [x, y, f] = clustering.centroid_raw(k);
        w.write_record([k.to_string(), num(x), num(y), num(f)])?;
    }
    w.flush()?;
    Ok(())
}

/// Min-max bounds per feature, enough to reproduce the scaling.
pub fn write_scaler<W: Write>(writer: W, clustering: &Clustering) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["feature", "min", "max"])?;
    for (i, name) in ["x", "y", "f"].iter().enumerate() {
        w.write_record([
            name.to_string(),
            num(clustering.scaler.min[i]),
            num(clustering.scaler.max[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_values<W: Write>(writer: W, fv: &FieldValues) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["state_kind", "cluster_id", "value"])?;
    for (kind, values) in [("own", fv.own_values()), ("opp", fv.opp_values())] {
        for (k, v) in values.iter().enumerate() {
            w.write_record([kind.to_string(), k.to_string(), num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Coordinate-list dump of the raw transition counts.
pub fn write_transitions<W: Write>(writer: W, ts: &TransitionSystem) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "col", "count"])?;
    for (row, col, count) in ts.entries() {
        w.write_record([row.to_string(), col.to_string(), num(count)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rankings<W: Write>(writer: W, rankings: &[PlayerRanking]) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["player", "qpass_median", "team", "position", "pass_count"])?;
    for r in rankings {
        let player = if r.name.is_empty() { &r.player_id } else { &r.name };
        w.write_record([
            player.clone(),
            num(r.median_qpass),
            r.team_id.clone(),
            r.position.code().to_string(),
            r.pass_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_qpass_records<W: Write>(writer: W, records: &[QPassRecord]) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "match_id", "seq", "source_seq", "team_id", "player_id", "virtual", "successful",
        "x_start", "y_start", "x_end", "y_end", "c_s", "c_e", "l_e", "f_s", "f_e", "l_e_value",
        "qpass",
    ])?;
    for r in records {
        w.write_record([
            r.match_id.clone(),
            r.seq.to_string(),
            r.source_seq.map(|s| s.to_string()).unwrap_or_default(),
            r.team_id.clone(),
            r.player_id.clone(),
            u8::from(r.is_virtual).to_string(),
            u8::from(r.successful).to_string(),
            num(r.start.x),
            num(r.start.y),
            num(r.end.x),
            num(r.end.y),
            r.c_s.to_string(),
            r.c_e.to_string(),
            r.l_e.map(|l| l.to_string()).unwrap_or_default(),
            num(r.f_s),
            num(r.f_e),
            r.l_e_value.map(num).unwrap_or_default(),
            num(r.qpass),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Step points of each position group's lost-ball CDF.
pub fn write_cdf<W: Write>(writer: W, report: &CdfReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["position", "qpass", "cumulative_fraction"])?;
    for g in &report.groups {
        for (q, frac) in &g.points {
            w.write_record([g.group.code().to_string(), num(*q), num(*frac)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_beneficial<W: Write>(writer: W, report: &CdfReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["position", "unsuccessful_passes", "beneficial_fraction"])?;
    for g in &report.groups {
        w.write_record([
            g.group.code().to_string(),
            g.count().to_string(),
            num(g.beneficial_fraction),
        ])?;
    }
    w.flush()?;
    Ok(())
}
