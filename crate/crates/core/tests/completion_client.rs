use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use cookltl::translate::{
    build_prompt, prompt_examples, reference_case, run_suite, translate, CompletionClient, Grade, HttpCompletionClient,
    TranslateError,
};

/// Serves `responses` in order, one per connection, and records request bodies.
fn serve(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<(String, String)>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut head = String::new();
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if line == "\r\n" {
                    break;
                }
                head.push_str(&line);
            }
            let mut req = vec![0u8; len];
            reader.read_exact(&mut req).unwrap();
            log.lock().unwrap().push((head, String::from_utf8(req).unwrap()));
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, seen)
}

fn client(url: &str) -> HttpCompletionClient {
    let mut c = HttpCompletionClient::new(url, Some("test-key".into())).unwrap();
    c.backoff = Duration::from_millis(1);
    c
}

#[test]
fn completion_is_parsed_and_truncated() {
    let (_, gold, _) = reference_case();
    let body = serde_json::json!({ "choices": [{ "text": format!(" {gold}\n\n8. NL: more") }] }).to_string();
    let (url, seen) = serve(vec![(200, body)]);
    let mut c = client(&url);
    c.model = Some("some-model".into());
    let prompt = build_prompt(&prompt_examples(), &reference_case().0.nl).unwrap();
    let text = translate(&c, &prompt).unwrap();
    assert_eq!(text.trim(), gold);
    assert_eq!(c.calls(), 1);

    let seen = seen.lock().unwrap();
    let (head, body) = &seen[0];
    assert!(head.to_ascii_lowercase().contains("authorization: bearer test-key"));
    let req: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(req["prompt"], prompt.as_str());
    assert_eq!(req["temperature"], 0);
    assert_eq!(req["model"], "some-model");
    assert!(req["max_tokens"].as_u64().unwrap() > 0);
}

#[test]
fn transient_failures_are_retried() {
    let (url, _) = serve(vec![
        (503, "{}".into()),
        (200, serde_json::json!({ "completion": "('x')" }).to_string()),
    ]);
    let c = client(&url);
    assert_eq!(c.complete("p").unwrap(), "('x')");
    assert_eq!(c.calls(), 2);
}

#[test]
fn auth_failure_is_distinct_and_not_retried() {
    let (url, _) = serve(vec![(401, "{}".into())]);
    let c = client(&url);
    assert!(matches!(c.complete("p"), Err(TranslateError::Auth(_))));
    assert_eq!(c.calls(), 1);
}

#[test]
fn unreachable_endpoint_fails_after_three_attempts() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = client(&format!("http://127.0.0.1:{port}/"));
    match c.complete("p") {
        Err(TranslateError::Network { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("{other:?}"),
    }
    assert_eq!(c.calls(), 3);
}

#[test]
fn suite_records_client_errors_per_case() {
    let (_, gold, _) = reference_case();
    let (url, _) = serve(vec![
        (200, serde_json::json!({ "text": gold }).to_string()),
        (400, "{}".into()),
    ]);
    let c = client(&url);
    let case = reference_case().0;
    let report = run_suite(&c, &prompt_examples(), &[case.clone(), case], 1).unwrap();
    assert_eq!(report.records[0].grade, Grade::AbsolutelyCorrect);
    assert_eq!(report.records[1].grade, Grade::Incorrect);
    assert!(report.records[1].error.is_some());
    assert_eq!(report.summary.failures, 1);
    assert_eq!(report.summary.fractions[&Grade::AbsolutelyCorrect], 0.5);

    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    let lines = std::fs::read_to_string(dir.path().join("cases.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 2);
    assert!(lines.contains("\"grade\":\"absolutely_correct\""));
    assert!(dir.path().join("summary.json").exists());
}
