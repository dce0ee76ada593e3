//! Namespace and term IRIs shared across the crate.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";

pub const VSTOI: &str = "http://hadatac.org/ont/vstoi#";
pub const HASCO: &str = "http://hadatac.org/ont/hasco#";
pub const HACITO: &str = "http://hadatac.org/ont/hacito#";
pub const QOE: &str = "http://hadatac.org/ont/qoe#";
pub const QOE_M: &str = "http://hadatac.org/ont/qoe-m#";
pub const CCSV: &str = "http://hadatac.org/ont/ccsv#";

/// Base for IRIs minted by the loader (instances, datasets, provenance nodes).
pub const KG: &str = "http://hadatac.org/kg/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
pub const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
pub const XSD_G_YEAR_MONTH: &str = "http://www.w3.org/2001/XMLSchema#gYearMonth";

pub const PROV_ACTIVITY: &str = "http://www.w3.org/ns/prov#Activity";
pub const PROV_WAS_GENERATED_BY: &str = "http://www.w3.org/ns/prov#wasGeneratedBy";
pub const PROV_STARTED_AT: &str = "http://www.w3.org/ns/prov#startedAtTime";
pub const PROV_ENDED_AT: &str = "http://www.w3.org/ns/prov#endedAtTime";

pub const DCTERMS_IDENTIFIER: &str = "http://purl.org/dc/terms/identifier";

pub const VSTOI_INSTRUMENT: &str = "http://hadatac.org/ont/vstoi#Instrument";
pub const VSTOI_DEPLOYMENT: &str = "http://hadatac.org/ont/vstoi#Deployment";
pub const VSTOI_PLATFORM: &str = "http://hadatac.org/ont/vstoi#Platform";
pub const VSTOI_HAS_PLATFORM: &str = "http://hadatac.org/ont/vstoi#hasPlatform";
pub const VSTOI_HAS_INSTRUMENT: &str = "http://hadatac.org/ont/vstoi#hasInstrument";

pub const HASCO_STUDY: &str = "http://hadatac.org/ont/hasco#Study";
pub const HASCO_STUDY_STEP: &str = "http://hadatac.org/ont/hasco#StudyStep";
pub const HASCO_DATA_ACQUISITION: &str = "http://hadatac.org/ont/hasco#DataAcquisition";
pub const HASCO_DATA_ANALYSIS: &str = "http://hadatac.org/ont/hasco#DataAnalysis";
pub const HASCO_HAS_DEPLOYMENT: &str = "http://hadatac.org/ont/hasco#hasDeployment";
pub const HASCO_IS_MEMBER_OF: &str = "http://hadatac.org/ont/hasco#isMemberOf";

pub const HACITO_MANUAL_DATA_ANNOTATION: &str = "http://hadatac.org/ont/hacito#ManualDataAnnotation";
pub const HACITO_ANNOTATOR_SOFTWARE: &str = "http://hadatac.org/ont/hacito#AnnotatorSoftware";
pub const HACITO_INFORMATION_SYSTEM: &str = "http://hadatac.org/ont/hacito#InformationSystem";

pub const QOE_INDICATOR: &str = "http://hadatac.org/ont/qoe#QoE_Indicator";
pub const QOE_MEASURE: &str = "http://hadatac.org/ont/qoe#Measure";
pub const QOE_DIMENSION: &str = "http://hadatac.org/ont/qoe#Dimension";
pub const QOE_THING: &str = "http://hadatac.org/ont/qoe#Thing";
pub const QOE_FUNCTION: &str = "http://hadatac.org/ont/qoe#Function";
pub const QOE_DEFINED_BY: &str = "http://hadatac.org/ont/qoe#definedBy";
pub const QOE_HAS_ASSOCIATED_THING: &str = "http://hadatac.org/ont/qoe#hasAssociatedThing";
pub const QOE_HAS_FUNCTION: &str = "http://hadatac.org/ont/qoe#hasFunction";
pub const QOE_ON_PROPERTY: &str = "http://hadatac.org/ont/qoe#onProperty";
pub const QOE_COVERED_BY: &str = "http://hadatac.org/ont/qoe#coveredBy";

pub const QOE_M_BICYCLE_SHARE_TRIP: &str = "http://hadatac.org/ont/qoe-m#Bicycle-Share_Trip";
pub const QOE_M_BICYCLE_SHARE_STATION: &str = "http://hadatac.org/ont/qoe-m#Bicycle-Share_Station";
pub const QOE_M_USER: &str = "http://hadatac.org/ont/qoe-m#User";

pub const CCSV_CONTAINS_RECORDS_OF: &str = "http://hadatac.org/ont/ccsv#containsRecordsOf";
pub const CCSV_HAS_COLUMN: &str = "http://hadatac.org/ont/ccsv#hasColumn";
pub const CCSV_COLUMN_INDEX: &str = "http://hadatac.org/ont/ccsv#columnIndex";
pub const CCSV_COLUMN_NAME: &str = "http://hadatac.org/ont/ccsv#columnName";
pub const CCSV_IS_IDENTIFIER_FOR: &str = "http://hadatac.org/ont/ccsv#isIdentifierFor";
pub const CCSV_IS_ATTRIBUTE_OF: &str = "http://hadatac.org/ont/ccsv#isAttributeOf";
pub const CCSV_REFERENCES: &str = "http://hadatac.org/ont/ccsv#references";
pub const CCSV_DATATYPE: &str = "http://hadatac.org/ont/ccsv#datatype";
pub const CCSV_LANGUAGE: &str = "http://hadatac.org/ont/ccsv#language";
pub const CCSV_VALUE_SEPARATOR: &str = "http://hadatac.org/ont/ccsv#valueSeparator";

/// The standard prefix table attached to graphs this crate produces.
pub const STANDARD_PREFIXES: &[(&str, &str)] = &[
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("xsd", XSD),
    ("prov", PROV),
    ("dcterms", DCTERMS),
    ("vstoi", VSTOI),
    ("hasco", HASCO),
    ("hacito", HACITO),
    ("qoe", QOE),
    ("qoe-m", QOE_M),
    ("ccsv", CCSV),
    ("kg", KG),
];

/// The part of an IRI after its last `#` or `/`.
pub fn local_name(iri: &str) -> &str {
    let cut = iri.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
    &iri[cut..]
}
