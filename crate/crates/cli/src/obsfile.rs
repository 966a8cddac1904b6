//! Line-delimited observation files.
//!
//! The first line is a header record declaring the feature kind, dimension,
//! and the per-speaker observation count K. Every following line is one
//! observation: a speaker id, a segment index in 0..K, and either a
//! `vector` of reals (embedding kind) or a `counts` array of non-negative
//! integers (histogram kind). Segments of each speaker must cover 0..K-1
//! exactly once; speaker order is order of first appearance.
//!
//! ```text
//! {"kind":"embedding","dimension":3,"obs_per_speaker":2}
//! {"speaker":"alice","segment":0,"vector":[0.1,0.2,0.3]}
//! {"speaker":"alice","segment":1,"vector":[0.1,0.1,0.4]}
//! {"speaker":"bob","segment":0,"vector":[0.9,0.0,0.2]}
//! {"speaker":"bob","segment":1,"vector":[0.8,0.1,0.2]}
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use rankdisc::{FeatureKind, FeatureObservation, ObservationSet};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
struct HeaderRecord {
    kind: String,
    dimension: usize,
    obs_per_speaker: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct DataRecord {
    speaker: String,
    segment: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<u64>>,
}

fn bad_line(line: usize, message: impl fmt::Display) -> CliError {
    CliError::Validation(format!("line {line}: {message}"))
}

pub fn parse_kind(s: &str) -> Result<FeatureKind, String> {
    match s {
        "embedding" => Ok(FeatureKind::EmbeddingVector),
        "counts" => Ok(FeatureKind::CountHistogram),
        other => Err(format!(
            "unknown feature kind {other:?} (expected embedding or counts)"
        )),
    }
}

pub fn read_observations(text: &str) -> CliResult<ObservationSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header_line) = lines
        .next()
        .ok_or_else(|| CliError::Validation("empty observation file".into()))?;
    let header: HeaderRecord = serde_json::from_str(header_line)
        .map_err(|e| bad_line(1, format_args!("bad header record: {e}")))?;
    let kind = parse_kind(&header.kind).map_err(|e| bad_line(1, e))?;
    if header.dimension == 0 {
        return Err(bad_line(1, "dimension must be >= 1"));
    }
    if header.obs_per_speaker == 0 {
        return Err(bad_line(1, "obs_per_speaker must be >= 1"));
    }
    let k = header.obs_per_speaker;

    let mut speakers: Vec<String> = Vec::new();
    let mut observations: Vec<Vec<Option<FeatureObservation>>> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let record: DataRecord = serde_json::from_str(line)
            .map_err(|e| bad_line(line_no, format_args!("bad record: {e}")))?;
        if record.segment >= k {
            return Err(bad_line(
                line_no,
                format_args!("segment {} out of range 0..{k}", record.segment),
            ));
        }
        let obs = match (kind, record.vector, record.counts) {
            (FeatureKind::EmbeddingVector, Some(v), None) => {
                FeatureObservation::embedding(v).map_err(|e| bad_line(line_no, e))?
            }
            (FeatureKind::CountHistogram, None, Some(c)) => {
                FeatureObservation::counts(c.into_iter().map(|v| v as f64).collect())
                    .map_err(|e| bad_line(line_no, e))?
            }
            (FeatureKind::EmbeddingVector, _, _) => {
                return Err(bad_line(
                    line_no,
                    "embedding files need exactly a `vector` field",
                ))
            }
            (FeatureKind::CountHistogram, _, _) => {
                return Err(bad_line(
                    line_no,
                    "counts files need exactly a `counts` field",
                ))
            }
        };
        if obs.dimension() != header.dimension {
            return Err(bad_line(
                line_no,
                format_args!(
                    "dimension {} does not match declared {}",
                    obs.dimension(),
                    header.dimension
                ),
            ));
        }
        let speaker_index = match speakers.iter().position(|s| s == &record.speaker) {
            Some(i) => i,
            None => {
                speakers.push(record.speaker.clone());
                observations.push(vec![None; k]);
                speakers.len() - 1
            }
        };
        let slot = &mut observations[speaker_index][record.segment];
        if slot.is_some() {
            return Err(bad_line(
                line_no,
                format_args!(
                    "duplicate segment {} for speaker {:?}",
                    record.segment, record.speaker
                ),
            ));
        }
        *slot = Some(obs);
    }

    let mut complete = Vec::with_capacity(speakers.len());
    for (speaker, obs) in speakers.iter().zip(observations) {
        let mut seq = Vec::with_capacity(k);
        for (segment, slot) in obs.into_iter().enumerate() {
            match slot {
                Some(o) => seq.push(o),
                None => {
                    return Err(CliError::Validation(format!(
                        "speaker {speaker:?} is missing segment {segment}"
                    )))
                }
            }
        }
        complete.push(seq);
    }
    Ok(ObservationSet::new(speakers, complete)?)
}

pub fn write_observations(data: &ObservationSet) -> CliResult<String> {
    let kind = data.kind();
    let header = HeaderRecord {
        kind: kind.as_str().to_string(),
        dimension: data.dimension(),
        obs_per_speaker: data.obs_per_speaker(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (i, speaker) in data.speakers().iter().enumerate() {
        for (segment, obs) in data.observations_of(i).iter().enumerate() {
            let record = match kind {
                FeatureKind::EmbeddingVector => DataRecord {
                    speaker: speaker.clone(),
                    segment,
                    vector: Some(obs.values().to_vec()),
                    counts: None,
                },
                FeatureKind::CountHistogram => {
                    let counts = obs
                        .values()
                        .iter()
                        .map(|&v| {
                            if v.fract() == 0.0 && v >= 0.0 {
                                Ok(v as u64)
                            } else {
                                Err(CliError::Validation(format!(
                                    "speaker {speaker:?} segment {segment}: counts must be non-negative integers"
                                )))
                            }
                        })
                        .collect::<CliResult<Vec<u64>>>()?;
                    DataRecord {
                        speaker: speaker.clone(),
                        segment,
                        vector: None,
                        counts: Some(counts),
                    }
                }
            };
            out.push_str(&serde_json::to_string(&record).expect("record serializes"));
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{"kind":"embedding","dimension":2,"obs_per_speaker":2}
{"speaker":"a","segment":0,"vector":[1.0,0.0]}
{"speaker":"a","segment":1,"vector":[0.9,0.1]}
{"speaker":"b","segment":1,"vector":[0.0,1.0]}
{"speaker":"b","segment":0,"vector":[0.1,0.9]}
"#;

    #[test]
    fn parses_records_in_any_segment_order() {
        let set = read_observations(SAMPLE).unwrap();
        assert_eq!(set.speakers(), &["a".to_string(), "b".to_string()]);
        assert_eq!(set.obs_per_speaker(), 2);
        assert_eq!(set.observations_of(1)[0].values(), &[0.1, 0.9]);
    }

    #[test]
    fn round_trips() {
        let set = read_observations(SAMPLE).unwrap();
        let text = write_observations(&set).unwrap();
        let again = read_observations(&text).unwrap();
        assert_eq!(again.speakers(), set.speakers());
        for i in 0..set.n_speakers() {
            assert_eq!(again.observations_of(i), set.observations_of(i));
        }
    }

    #[test]
    fn reports_line_numbers() {
        let text = r#"{"kind":"embedding","dimension":2,"obs_per_speaker":2}
{"speaker":"a","segment":0,"vector":[1.0,0.0]}
{"speaker":"a","segment":0,"vector":[1.0,0.0]}
"#;
        let err = read_observations(text).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");

        let text = r#"{"kind":"embedding","dimension":2,"obs_per_speaker":2}
{"speaker":"a","segment":5,"vector":[1.0,0.0]}
"#;
        let err = read_observations(text).unwrap_err();
        assert!(err.to_string().contains("segment 5"), "{err}");
    }

    #[test]
    fn missing_segment_is_reported() {
        let text = r#"{"kind":"embedding","dimension":2,"obs_per_speaker":2}
{"speaker":"a","segment":0,"vector":[1.0,0.0]}
{"speaker":"a","segment":1,"vector":[1.0,0.0]}
{"speaker":"b","segment":0,"vector":[0.0,1.0]}
"#;
        let err = read_observations(text).unwrap_err();
        assert!(err.to_string().contains("missing segment 1"), "{err}");
    }

    #[test]
    fn kind_field_mismatch() {
        let text = r#"{"kind":"counts","dimension":2,"obs_per_speaker":1}
{"speaker":"a","segment":0,"vector":[1.0,0.0]}
"#;
        let err = read_observations(text).unwrap_err();
        assert!(err.to_string().contains("counts"), "{err}");
    }

    #[test]
    fn counts_file_round_trip() {
        let text = r#"{"kind":"counts","dimension":3,"obs_per_speaker":1}
{"speaker":"a","segment":0,"counts":[5,0,2]}
{"speaker":"b","segment":0,"counts":[0,9,1]}
"#;
        let set = read_observations(text).unwrap();
        assert_eq!(set.observations_of(0)[0].values(), &[5.0, 0.0, 2.0]);
        let again = read_observations(&write_observations(&set).unwrap()).unwrap();
        assert_eq!(again.observations_of(1)[0].values(), &[0.0, 9.0, 1.0]);
    }
}
