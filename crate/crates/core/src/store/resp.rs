//! Just enough of the RESP wire protocol for GET/SET/DEL.

use std::io::{self, BufRead, Write};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Simple(String),
    Error(String),
    Integer(i64),
    Bulk(Option<Vec<u8>>),
    Array(Option<Vec<Reply>>),
}

pub fn write_command<W: Write>(w: &mut W, parts: &[&[u8]]) -> io::Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(format!("*{}\r\n", parts.len()).as_bytes());
    for p in parts {
        buf.extend_from_slice(format!("${}\r\n", p.len()).as_bytes());
        buf.extend_from_slice(p);
        buf.extend_from_slice(b"\r\n");
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn write_reply<W: Write>(w: &mut W, reply: &Reply) -> io::Result<()> {
    match reply {
        Reply::Simple(s) => write!(w, "+{s}\r\n"),
        Reply::Error(s) => write!(w, "-{s}\r\n"),
        Reply::Integer(i) => write!(w, ":{i}\r\n"),
        Reply::Bulk(None) => w.write_all(b"$-1\r\n"),
        Reply::Bulk(Some(b)) => {
            write!(w, "${}\r\n", b.len())?;
            w.write_all(b)?;
            w.write_all(b"\r\n")
        }
        Reply::Array(None) => w.write_all(b"*-1\r\n"),
        Reply::Array(Some(items)) => {
            write!(w, "*{}\r\n", items.len())?;
            items.iter().try_for_each(|i| write_reply(w, i))
        }
    }
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_line<R: BufRead>(r: &mut R) -> io::Result<String> {
    let mut line = Vec::new();
    if r.read_until(b'\n', &mut line)? == 0 {
        return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "connection closed"));
    }
    if line.ends_with(b"\r\n") {
        line.truncate(line.len() - 2);
    } else if line.ends_with(b"\n") {
        line.truncate(line.len() - 1);
    }
    String::from_utf8(line).map_err(|_| bad("header is not UTF-8"))
}

fn read_len(s: &str) -> io::Result<i64> {
    s.parse().map_err(|_| bad(format!("bad length `{s}`")))
}

pub fn read_reply<R: BufRead>(r: &mut R) -> io::Result<Reply> {
    let line = read_line(r)?;
    let (tag, rest) = line.split_at(line.len().min(1));
    match tag {
        "+" => Ok(Reply::Simple(rest.to_string())),
        "-" => Ok(Reply::Error(rest.to_string())),
        ":" => Ok(Reply::Integer(read_len(rest)?)),
        "$" => {
            let n = read_len(rest)?;
            if n < 0 {
                return Ok(Reply::Bulk(None));
            }
            let mut data = vec![0u8; n as usize + 2];
            r.read_exact(&mut data)?;
            data.truncate(n as usize);
            Ok(Reply::Bulk(Some(data)))
        }
        "*" => {
            let n = read_len(rest)?;
            if n < 0 {
                return Ok(Reply::Array(None));
            }
            (0..n).map(|_| read_reply(r)).collect::<io::Result<Vec<_>>>().map(|v| Reply::Array(Some(v)))
        }
        _ => Err(bad(format!("unexpected reply `{line}`"))),
    }
}

/// Reads one command: a RESP array of bulk strings, or an inline space-separated line.
pub fn read_command<R: BufRead>(r: &mut R) -> io::Result<Vec<Vec<u8>>> {
    loop {
        let buf = r.fill_buf()?;
        if buf.is_empty() {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "connection closed"));
        }
        if buf[0] == b'*' {
            return match read_reply(r)? {
                Reply::Array(Some(items)) => items
                    .into_iter()
                    .map(|i| match i {
                        Reply::Bulk(Some(b)) => Ok(b),
                        _ => Err(bad("command parts must be bulk strings")),
                    })
                    .collect(),
                _ => Err(bad("empty command")),
            };
        }
        let line = read_line(r)?;
        let parts: Vec<Vec<u8>> = line.split_whitespace().map(|s| s.as_bytes().to_vec()).collect();
        if !parts.is_empty() {
            return Ok(parts);
        }
    }
}
