//! Line-oriented chat against one in-process session.

use std::io::{self, BufRead, Write};

use crate::engine::{ChatRequest, Engine};

pub const REPL_SESSION: &str = "repl";

/// Read lines from `input` until end of input or `/quit`, writing each
/// reply as `bot: ...`. `/state` prints the conversation state as JSON and
/// `/log` one line per recorded turn.
pub fn run_repl(engine: &Engine, session_id: &str, input: impl BufRead, mut output: impl Write) -> io::Result<i32> {
    for line in input.lines() {
        let line = line?;
        let text = line.trim();
        match text {
            "" => continue,
            "/quit" => return Ok(0),
            "/state" => match engine.session_state(session_id) {
                Ok(Some(state)) => writeln!(output, "{}", serde_json::to_string_pretty(&state).map_err(io::Error::other)?)?,
                Ok(None) => writeln!(output, "no conversation yet")?,
                Err(e) => writeln!(output, "error: {e}")?,
            },
            "/log" => match engine.session_state(session_id) {
                Ok(Some(state)) => {
                    for t in &state.turns {
                        writeln!(
                            output,
                            "{} {} {} {} {}",
                            t.index,
                            t.phase,
                            t.annotations.intent.name(),
                            t.responder_id,
                            t.user_text
                        )?;
                    }
                }
                Ok(None) => writeln!(output, "no conversation yet")?,
                Err(e) => writeln!(output, "error: {e}")?,
            },
            _ => match engine.handle_chat(&ChatRequest { session_id: session_id.to_string(), text: text.to_string() }) {
                Ok(reply) => writeln!(output, "bot: {}", reply.reply_text)?,
                Err(e) => writeln!(output, "error: {e}")?,
            },
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::state::FixedClock;

    fn run(script: &str) -> (i32, String) {
        let engine = Engine::in_memory(Config::default()).unwrap().with_clock(FixedClock(0));
        let mut out = Vec::new();
        let code = run_repl(&engine, REPL_SESSION, script.as_bytes(), &mut out).unwrap();
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn quit_exits_cleanly() {
        assert_eq!(run("/quit\nhello\n"), (0, String::new()));
    }

    #[test]
    fn state_and_log() {
        let (code, out) = run("hello\n/state\n/log\n");
        assert_eq!(code, 0);
        assert!(out.starts_with("bot: "));
        assert!(out.contains("\"session_id\": \"repl\""));
        assert!(out.trim_end().ends_with("0 Initialization Chitchat launch hello"));
    }

    #[test]
    fn transcripts_repeat() {
        let script = "hi\nI want to make lemon pie\nthe first one\nnext\nhow many eggs do I need\n";
        assert_eq!(run(script), run(script));
    }
}
