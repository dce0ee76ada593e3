use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{slug, IngestError};
use crate::ns;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionKind {
    /// Data annotated by the system that produced it.
    Native,
    /// Data annotated afterwards by annotator software on a legacy system.
    ManualAnnotation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSource {
    pub platform_iri: String,
    pub platform_label: String,
    /// Present exactly when the acquisition is a manual annotation.
    pub annotator_label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeFrame {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

/// Validated answers about where a dataset came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCharacterization {
    pub data_source: DataSource,
    pub acquisition_kind: AcquisitionKind,
    pub study_iri: String,
    pub study_label: String,
    pub time_frame: TimeFrame,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSourceAnswers {
    pub platform_label: Option<String>,
    pub platform_iri: Option<String>,
    pub annotator_label: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyAnswers {
    pub label: Option<String>,
    pub iri: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFrameAnswers {
    pub start: Option<String>,
    pub end: Option<String>,
}

/// Raw answers to the characterization questions, as read from a config
/// file, a request body or prompts. Any of them may still be missing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterizationAnswers {
    pub data_source: Option<DataSourceAnswers>,
    pub acquisition_kind: Option<AcquisitionKind>,
    pub study: Option<StudyAnswers>,
    pub time_frame: Option<TimeFrameAnswers>,
}

fn non_empty(v: Option<&String>) -> Option<&str> {
    v.map(|s| s.trim()).filter(|s| !s.is_empty())
}

fn instant(aspect: &str, text: &str) -> Result<DateTime<Utc>, IngestError> {
    DateTime::parse_from_rfc3339(text.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| IngestError::InvalidCharacterization(format!("{aspect} `{text}`: {e}")))
}

fn checked_iri(aspect: &str, iri: &str) -> Result<String, IngestError> {
    crate::rdf::Term::iri(iri)
        .map(|_| iri.to_string())
        .map_err(|_| IngestError::InvalidCharacterization(format!("{aspect} `{iri}` is not an IRI")))
}

/// Validates the answers, minting IRIs for the platform and the study when
/// only labels were given.
pub fn characterize(answers: &CharacterizationAnswers) -> Result<DatasetCharacterization, IngestError> {
    let missing = |aspect: &str| IngestError::IncompleteCharacterization(aspect.to_string());

    let ds = answers.data_source.as_ref().ok_or_else(|| missing("data_source"))?;
    let platform_label = non_empty(ds.platform_label.as_ref()).ok_or_else(|| missing("data_source"))?;
    let kind = answers.acquisition_kind.ok_or_else(|| missing("acquisition_kind"))?;
    let study = answers.study.as_ref().ok_or_else(|| missing("study"))?;
    let study_label = non_empty(study.label.as_ref()).ok_or_else(|| missing("study"))?;
    let tf = answers.time_frame.as_ref().ok_or_else(|| missing("time_frame"))?;
    let (Some(start), Some(end)) = (non_empty(tf.start.as_ref()), non_empty(tf.end.as_ref())) else {
        return Err(missing("time_frame"));
    };

    let start = instant("time_frame.start", start)?;
    let end = instant("time_frame.end", end)?;
    if start > end {
        return Err(IngestError::InvalidCharacterization(format!(
            "time_frame starts at {} after it ends at {}",
            start.to_rfc3339(),
            end.to_rfc3339()
        )));
    }
    let platform_iri = match non_empty(ds.platform_iri.as_ref()) {
        Some(iri) => checked_iri("data_source.platform_iri", iri)?,
        None => format!("{}platform/{}", ns::KG, slug(platform_label)),
    };
    let study_iri = match non_empty(study.iri.as_ref()) {
        Some(iri) => checked_iri("study.iri", iri)?,
        None => format!("{}study/{}", ns::KG, slug(study_label)),
    };
    let annotator_label = match kind {
        AcquisitionKind::Native => None,
        AcquisitionKind::ManualAnnotation => Some(
            non_empty(ds.annotator_label.as_ref())
                .map(str::to_string)
                .unwrap_or_else(|| format!("{platform_label} annotator")),
        ),
    };
    Ok(DatasetCharacterization {
        data_source: DataSource {
            platform_iri,
            platform_label: platform_label.to_string(),
            annotator_label,
        },
        acquisition_kind: kind,
        study_iri,
        study_label: study_label.to_string(),
        time_frame: TimeFrame { start, end },
    })
}
