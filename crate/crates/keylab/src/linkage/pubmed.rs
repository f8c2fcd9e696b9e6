//! Optional PubMed E-utilities client for populating the keyword store.
//!
//! The offline store file is the primary path; network use is off by
//! default and goes through an injectable [`Transport`] so tests run on
//! canned payloads. Parsed elements: `Keyword` (author keywords) and
//! `MeshHeading/DescriptorName` (MeSH descriptors).

use std::time::Duration;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{KeywordSource, RawKeyword};

/// Minimal HTTP-like transport. Implementations decide how the request is
/// actually made; the library ships none.
pub trait Transport {
    fn get(&self, url: &str) -> Result<TransportResponse, TransportError>;
}

#[derive(Debug, Clone)]
pub struct TransportResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, thiserror::Error)]
#[error("transport failure: {0}")]
pub struct TransportError(pub String);

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    /// Transient failure (transport error, 429, 5xx); the caller may retry.
    #[error("retryable fetch failure for PMID {pmid}: {reason}")]
    Retryable { pmid: String, reason: String },
    /// The payload arrived but could not be parsed.
    #[error("malformed payload for PMID {pmid}: {reason}")]
    Parse { pmid: String, reason: String },
}

/// E-utilities efetch URL for one PMID (`db=pubmed&retmode=xml`).
pub fn efetch_url(pmid: &str) -> String {
    format!(
        "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi?db=pubmed&retmode=xml&id={pmid}"
    )
}

/// Fetch and parse the keyword-bearing elements for one PMID.
pub fn fetch_pubmed_keywords(
    pmid: &str,
    transport: &dyn Transport,
) -> Result<Vec<RawKeyword>, FetchError> {
    let response = transport
        .get(&efetch_url(pmid))
        .map_err(|e| FetchError::Retryable {
            pmid: pmid.to_string(),
            reason: e.to_string(),
        })?;
    if response.status != 200 {
        return Err(FetchError::Retryable {
            pmid: pmid.to_string(),
            reason: format!("HTTP status {}", response.status),
        });
    }
    parse_efetch_keywords(&response.body, pmid)
}

/// Fetch several PMIDs with a fixed pause between requests.
pub fn fetch_all(
    pmids: &[String],
    transport: &dyn Transport,
    spacing: Duration,
) -> Vec<(String, Result<Vec<RawKeyword>, FetchError>)> {
    let mut results = Vec::with_capacity(pmids.len());
    for (i, pmid) in pmids.iter().enumerate() {
        if i > 0 && !spacing.is_zero() {
            std::thread::sleep(spacing);
        }
        results.push((pmid.clone(), fetch_pubmed_keywords(pmid, transport)));
    }
    results
}

/// Parse an efetch XML payload into raw keywords.
pub fn parse_efetch_keywords(xml: &str, pmid: &str) -> Result<Vec<RawKeyword>, FetchError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);

    let mut keywords = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    loop {
        match reader.read_event() {
            Ok(Event::Start(e)) => {
                stack.push(String::from_utf8_lossy(e.name().as_ref()).to_string());
            }
            Ok(Event::End(_)) => {
                stack.pop();
            }
            Ok(Event::Text(t)) => {
                let Some(element) = stack.last() else { continue };
                let source = match element.as_str() {
                    "Keyword" => Some(KeywordSource::PubmedAuthor),
                    "DescriptorName"
                        if stack.iter().rev().nth(1).map(String::as_str)
                            == Some("MeshHeading") =>
                    {
                        Some(KeywordSource::Mesh)
                    }
                    _ => None,
                };
                if let Some(source) = source {
                    let text = t.decode().map_err(|e| FetchError::Parse {
                        pmid: pmid.to_string(),
                        reason: e.to_string(),
                    })?;
                    keywords.extend(RawKeyword::new(&text, source, pmid));
                }
            }
            Ok(Event::Eof) => {
                if let Some(open) = stack.last() {
                    return Err(FetchError::Parse {
                        pmid: pmid.to_string(),
                        reason: format!("payload ended inside <{open}>"),
                    });
                }
                break;
            }
            Ok(_) => {}
            Err(e) => {
                return Err(FetchError::Parse {
                    pmid: pmid.to_string(),
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(keywords)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct CannedTransport {
        status: u16,
        body: &'static str,
    }

    impl Transport for CannedTransport {
        fn get(&self, _url: &str) -> Result<TransportResponse, TransportError> {
            Ok(TransportResponse {
                status: self.status,
                body: self.body.to_string(),
            })
        }
    }

    const PAYLOAD: &str = r#"<?xml version="1.0" ?>
<PubmedArticleSet>
  <PubmedArticle>
    <MedlineCitation>
      <MeshHeadingList>
        <MeshHeading>
          <DescriptorName UI="D012987">Soil Microbiology</DescriptorName>
          <QualifierName UI="Q000032">analysis</QualifierName>
        </MeshHeading>
      </MeshHeadingList>
      <KeywordList Owner="NOTNLM">
        <Keyword MajorTopicYN="N">metagenomics</Keyword>
        <Keyword MajorTopicYN="N">carbon cycling</Keyword>
      </KeywordList>
    </MedlineCitation>
  </PubmedArticle>
</PubmedArticleSet>"#;

    #[test]
    fn parses_keywords_and_descriptors() {
        let transport = CannedTransport { status: 200, body: PAYLOAD };
        let keywords = fetch_pubmed_keywords("12345", &transport).unwrap();
        assert_eq!(keywords.len(), 3);
        assert_eq!(keywords[0].text, "Soil Microbiology");
        assert_eq!(keywords[0].source, KeywordSource::Mesh);
        assert_eq!(keywords[1].text, "metagenomics");
        assert_eq!(keywords[1].source, KeywordSource::PubmedAuthor);
        assert!(keywords.iter().all(|k| k.publication_id == "12345"));
    }

    #[test]
    fn qualifier_names_are_not_keywords() {
        let transport = CannedTransport { status: 200, body: PAYLOAD };
        let keywords = fetch_pubmed_keywords("1", &transport).unwrap();
        assert!(keywords.iter().all(|k| k.text != "analysis"));
    }

    #[test]
    fn empty_keyword_list_yields_nothing() {
        let body = r#"<PubmedArticleSet><PubmedArticle><MedlineCitation>
            <KeywordList Owner="NOTNLM"></KeywordList>
            </MedlineCitation></PubmedArticle></PubmedArticleSet>"#;
        let keywords = parse_efetch_keywords(body, "1").unwrap();
        assert!(keywords.is_empty());
    }

    #[test]
    fn http_429_is_retryable() {
        let transport = CannedTransport { status: 429, body: "" };
        let err = fetch_pubmed_keywords("99", &transport).unwrap_err();
        assert!(matches!(err, FetchError::Retryable { pmid, .. } if pmid == "99"));
    }

    #[test]
    fn malformed_payload_is_a_parse_error() {
        let err = parse_efetch_keywords("<PubmedArticleSet><Unclosed>", "7");
        match err {
            Err(FetchError::Parse { pmid, .. }) => assert_eq!(pmid, "7"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn url_template() {
        assert_eq!(
            efetch_url("123"),
            "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi?db=pubmed&retmode=xml&id=123"
        );
    }
}
