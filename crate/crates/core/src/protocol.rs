//! Newline-delimited JSON protocol shared by external scorers, fixers and
//! breakers.
//!
//! Requests are `{"id": u64, "op": "score"|"fix"|"break", "sentences": [..]}`.
//! Responses carry the same id and one of `logprobs`, `outputs` or `error`.
//! A server may answer out of order; clients match responses by id.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixbreak::{Breaker, Fixer};
use crate::lm::Scorer;
use crate::text::Sentence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    pub op: String,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logprobs: Option<Vec<f64>>,
    /// Optional per-token breakdown; the built-in server always sends it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_token: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Response {
    fn error(id: u64, message: impl Into<String>) -> Self {
        Self {
            id,
            error: Some(message.into()),
            ..Self::default()
        }
    }
}

/// A protocol endpoint: `tcp:HOST:PORT` or `cmd:PROGRAM [ARGS..]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Tcp(String),
    Command(Vec<String>),
}

impl FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(addr) = s.strip_prefix("tcp://").or_else(|| s.strip_prefix("tcp:")) {
            if addr.is_empty() {
                return Err(Error::InvalidConfig("empty tcp address".into()));
            }
            return Ok(Endpoint::Tcp(addr.to_string()));
        }
        if let Some(cmd) = s.strip_prefix("cmd:") {
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if argv.is_empty() {
                return Err(Error::InvalidConfig("empty command endpoint".into()));
            }
            return Ok(Endpoint::Command(argv));
        }
        Err(Error::InvalidConfig(format!(
            "endpoint {s:?} must start with tcp: or cmd:"
        )))
    }
}

enum Transport {
    Child {
        child: Child,
        stdin: ChildStdin,
        stdout: BufReader<ChildStdout>,
    },
    Tcp {
        writer: TcpStream,
        reader: BufReader<TcpStream>,
    },
}

fn unavailable(e: std::io::Error) -> Error {
    Error::ScorerUnavailable(e.to_string())
}

/// One client connection. Requests are processed serially.
pub struct Connection {
    transport: Transport,
    next_id: u64,
    stash: HashMap<u64, Response>,
}

impl Connection {
    pub fn open(endpoint: &Endpoint) -> Result<Self> {
        let transport = match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr)
                    .map_err(|e| Error::ScorerUnavailable(format!("{addr}: {e}")))?;
                let reader = BufReader::new(stream.try_clone().map_err(unavailable)?);
                Transport::Tcp {
                    writer: stream,
                    reader,
                }
            }
            Endpoint::Command(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .spawn()
                    .map_err(|e| Error::ScorerUnavailable(format!("{}: {e}", argv[0])))?;
                let stdin = child.stdin.take().expect("stdin is piped");
                let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
                Transport::Child {
                    child,
                    stdin,
                    stdout,
                }
            }
        };
        Ok(Self {
            transport,
            next_id: 1,
            stash: HashMap::new(),
        })
    }

    fn send(&mut self, line: &[u8]) -> std::io::Result<()> {
        let w: &mut dyn Write = match &mut self.transport {
            Transport::Child { stdin, .. } => stdin,
            Transport::Tcp { writer, .. } => writer,
        };
        w.write_all(line)?;
        w.flush()
    }

    fn read_line(&mut self, buf: &mut String) -> std::io::Result<usize> {
        match &mut self.transport {
            Transport::Child { stdout, .. } => stdout.read_line(buf),
            Transport::Tcp { reader, .. } => reader.read_line(buf),
        }
    }

    /// Sends one request and waits for the response with the same id.
    pub fn call(&mut self, op: &str, sentences: Vec<String>) -> Result<Response> {
        let id = self.next_id;
        self.next_id += 1;
        let mut line = serde_json::to_vec(&Request {
            id,
            op: op.to_string(),
            sentences,
        })?;
        line.push(b'\n');
        self.send(&line).map_err(unavailable)?;
        loop {
            if let Some(resp) = self.stash.remove(&id) {
                return check(resp);
            }
            let mut buf = String::new();
            if self.read_line(&mut buf).map_err(unavailable)? == 0 {
                return Err(Error::ScorerUnavailable(
                    "endpoint closed the connection".into(),
                ));
            }
            if buf.trim().is_empty() {
                continue;
            }
            let resp: Response = serde_json::from_str(&buf)
                .map_err(|e| Error::Protocol(format!("malformed response: {e}")))?;
            if resp.id == id {
                return check(resp);
            }
            self.stash.insert(resp.id, resp);
        }
    }
}

fn check(resp: Response) -> Result<Response> {
    match resp.error {
        Some(msg) => Err(Error::Protocol(msg)),
        None => Ok(resp),
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Transport::Child { child, .. } = &mut self.transport {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// What a server can answer. Missing parts reply with an error.
#[derive(Clone, Default)]
pub struct Backend {
    pub scorer: Option<Arc<dyn Scorer>>,
    pub fixer: Option<Arc<dyn Fixer>>,
    pub breaker: Option<Arc<dyn Breaker>>,
}

impl Backend {
    pub fn handle(&self, req: &Request) -> Response {
        let sentences: Vec<Sentence> = req
            .sentences
            .iter()
            .map(|s| Sentence::new(s.as_str()))
            .collect();
        let result = match req.op.as_str() {
            "score" => self.scorer.as_ref().map(|s| {
                s.score_batch(&sentences).map(|scores| Response {
                    id: req.id,
                    logprobs: Some(scores.iter().map(|s| s.logprob).collect()),
                    per_token: Some(scores.into_iter().map(|s| s.per_token).collect()),
                    ..Response::default()
                })
            }),
            "fix" => self
                .fixer
                .as_ref()
                .map(|f| f.fix_batch(&sentences).map(|out| outputs(req.id, out))),
            "break" => self
                .breaker
                .as_ref()
                .map(|b| b.break_batch(&sentences).map(|out| outputs(req.id, out))),
            other => Some(Err(Error::Protocol(format!("unknown op {other:?}")))),
        };
        match result {
            Some(Ok(resp)) => resp,
            Some(Err(e)) => Response::error(req.id, e.to_string()),
            None => Response::error(req.id, format!("op {:?} is not served here", req.op)),
        }
    }
}

fn outputs(id: u64, sentences: Vec<Sentence>) -> Response {
    Response {
        id,
        outputs: Some(sentences.iter().map(Sentence::text).collect()),
        ..Response::default()
    }
}

/// Answers requests line by line until the reader is exhausted. Malformed
/// requests get an error response; the loop keeps going.
pub fn serve<R: BufRead, W: Write>(backend: &Backend, reader: R, mut writer: W) -> Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = match serde_json::from_str::<Request>(&line) {
            Ok(req) => backend.handle(&req),
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id").and_then(serde_json::Value::as_u64))
                    .unwrap_or(0);
                Response::error(id, format!("malformed request: {e}"))
            }
        };
        serde_json::to_writer(&mut writer, &resp)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
    Ok(())
}

/// Serves each accepted connection on its own thread.
pub fn serve_tcp(backend: Backend, listener: TcpListener) -> Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let backend = backend.clone();
        std::thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(e) => {
                    log::warn!("dropping connection: {e}");
                    return;
                }
            };
            if let Err(e) = serve(&backend, reader, stream) {
                log::warn!("connection ended with error: {e}");
            }
        });
    }
    Ok(())
}
