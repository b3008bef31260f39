//! Length-prefixed frames: 4-byte big-endian payload length, 1-byte type,
//! payload.

use std::io::{self, Read, Write};

use super::ProtocolError;

/// Largest payload accepted from a peer. Bounds the allocation a malicious
/// length prefix can trigger.
pub const MAX_PAYLOAD: usize = 1 << 30;

/// Bytes of header in front of every payload.
pub const HEADER_BYTES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    Hello = 1,
    Params = 2,
    ParamsAck = 3,
    Ot1 = 4,
    Ot2 = 5,
    Ot3 = 6,
    GarblerInputs = 7,
    CycleTables = 8,
    DecodeInfo = 9,
    Output = 10,
    Close = 11,
    Error = 12,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<MsgType> {
        use MsgType::*;
        [
            Hello,
            Params,
            ParamsAck,
            Ot1,
            Ot2,
            Ot3,
            GarblerInputs,
            CycleTables,
            DecodeInfo,
            Output,
            Close,
            Error,
        ]
        .into_iter()
        .find(|t| *t as u8 == b)
    }
}

pub fn write_frame<W: Write + ?Sized>(
    w: &mut W,
    ty: MsgType,
    payload: &[u8],
) -> Result<(), ProtocolError> {
    if payload.len() > MAX_PAYLOAD {
        return Err(ProtocolError::FrameTooLarge(payload.len()));
    }
    let mut header = [0u8; HEADER_BYTES];
    header[..4].copy_from_slice(&(payload.len() as u32).to_be_bytes());
    header[4] = ty as u8;
    w.write_all(&header)?;
    w.write_all(payload)?;
    Ok(())
}

/// Read one frame into `buf`, reusing its allocation.
pub fn read_frame_into<R: Read + ?Sized>(
    r: &mut R,
    buf: &mut Vec<u8>,
) -> Result<MsgType, ProtocolError> {
    let mut header = [0u8; HEADER_BYTES];
    r.read_exact(&mut header)?;
    let len = u32::from_be_bytes(header[..4].try_into().unwrap()) as usize;
    let ty = MsgType::from_byte(header[4]).ok_or(ProtocolError::UnknownType(header[4]))?;
    if len > MAX_PAYLOAD {
        return Err(ProtocolError::FrameTooLarge(len));
    }
    buf.clear();
    buf.resize(len, 0);
    r.read_exact(buf)?;
    Ok(ty)
}

pub fn read_frame<R: Read + ?Sized>(r: &mut R) -> Result<(MsgType, Vec<u8>), ProtocolError> {
    let mut buf = Vec::new();
    let ty = read_frame_into(r, &mut buf)?;
    Ok((ty, buf))
}

/// Read a frame and require its type. An ERROR frame from the peer surfaces
/// as [`ProtocolError::Peer`].
pub fn expect_frame<R: Read + ?Sized>(
    r: &mut R,
    want: MsgType,
    buf: &mut Vec<u8>,
) -> Result<(), ProtocolError> {
    let got = read_frame_into(r, buf)?;
    if got == want {
        return Ok(());
    }
    if got == MsgType::Error {
        let code = buf.first().copied().unwrap_or(0);
        let message = String::from_utf8_lossy(buf.get(1..).unwrap_or(&[])).into_owned();
        return Err(ProtocolError::Peer { code, message });
    }
    Err(ProtocolError::UnexpectedFrame {
        expected: want,
        got,
    })
}

/// Byte counters around a stream.
pub struct Metered<S> {
    inner: S,
    pub sent: u64,
    pub received: u64,
}

impl<S> Metered<S> {
    pub fn new(inner: S) -> Self {
        Metered {
            inner,
            sent: 0,
            received: 0,
        }
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: Read> Read for Metered<S> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.received += n as u64;
        Ok(n)
    }
}

impl<S: Write> Write for Metered<S> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.sent += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
