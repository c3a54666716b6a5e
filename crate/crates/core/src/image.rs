//! Lossless image decoding into per-channel sample planes, and directory scanning.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat as CodecFormat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path} is not a decodable image: {reason}")]
    NotAnImage { path: PathBuf, reason: String },
    #[error("{path} uses {depth}; only 8 bits per channel are supported")]
    UnsupportedDepth { path: PathBuf, depth: &'static str },
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("invalid sample layout: {0}")]
    InvalidLayout(String),
    #[error("cannot encode image to {path}: {reason}")]
    Encode { path: PathBuf, reason: String },
}

/// Decoded image as 8-bit sample planes, one row-major plane per channel.
///
/// Images with an alpha channel lose it at decode time, so `channels` is
/// either 1 (grayscale) or 3 (RGB).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleImage {
    width: usize,
    height: usize,
    planes: Vec<Vec<u8>>,
    source_path: Option<PathBuf>,
    file_size: u64,
    lossy_source: bool,
}

impl SampleImage {
    /// Builds an in-memory image. `file_size` is set to the raw sample count,
    /// which is what a headerless dump of the planes would occupy.
    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<u8>>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidLayout(format!("empty image {width}x{height}")));
        }
        if planes.len() != 1 && planes.len() != 3 {
            return Err(ImageError::InvalidLayout(format!(
                "expected 1 or 3 planes, got {}",
                planes.len()
            )));
        }
        if let Some(p) = planes.iter().find(|p| p.len() != width * height) {
            return Err(ImageError::InvalidLayout(format!(
                "plane has {} samples, expected {}",
                p.len(),
                width * height
            )));
        }
        let file_size = (width * height * planes.len()) as u64;
        Ok(Self {
            width,
            height,
            planes,
            source_path: None,
            file_size,
            lossy_source: false,
        })
    }

    /// Builds an image from channel-interleaved samples (R,G,B of pixel 0, then pixel 1, ...).
    pub fn from_interleaved(width: usize, height: usize, channels: usize, samples: &[u8]) -> Result<Self, ImageError> {
        if channels == 0 || samples.len() != width * height * channels {
            return Err(ImageError::InvalidLayout(format!(
                "{} samples do not fill {width}x{height}x{channels}",
                samples.len()
            )));
        }
        let planes = (0..channels)
            .map(|c| samples.iter().skip(c).step_by(channels).copied().collect())
            .collect();
        Self::from_planes(width, height, planes)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Total number of samples, i.e. the LSB capacity in bits.
    pub fn sample_count(&self) -> usize {
        self.pixel_count() * self.channels()
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<u8>] {
        &self.planes
    }

    pub fn source_path(&self) -> Option<&Path> {
        self.source_path.as_deref()
    }

    pub fn file_size(&self) -> u64 {
        self.file_size
    }

    pub fn is_lossy_source(&self) -> bool {
        self.lossy_source
    }

    /// Sample at channel-interleaved row-major index.
    pub fn sample(&self, index: usize) -> u8 {
        let c = self.channels();
        self.planes[index % c][index / c]
    }

    pub fn set_sample(&mut self, index: usize, value: u8) {
        let c = self.channels();
        self.planes[index % c][index / c] = value;
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let c = self.channels();
        let mut out = vec![0u8; self.sample_count()];
        for (ch, plane) in self.planes.iter().enumerate() {
            for (i, &v) in plane.iter().enumerate() {
                out[i * c + ch] = v;
            }
        }
        out
    }

    fn to_dynamic(&self) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        let data = self.to_interleaved();
        match self.channels() {
            1 => DynamicImage::ImageLuma8(image::GrayImage::from_raw(w, h, data).expect("sized buffer")),
            _ => DynamicImage::ImageRgb8(image::RgbImage::from_raw(w, h, data).expect("sized buffer")),
        }
    }

    /// Writes the image losslessly; the format follows the file extension (`.png` or `.bmp`).
    /// A grayscale BMP is stored with a grey palette, so it decodes back as
    /// three identical channels.
    pub fn save(&self, path: &Path) -> Result<(), ImageError> {
        let format = CodecFormat::from_path(path).unwrap_or(CodecFormat::Png);
        if !matches!(format, CodecFormat::Png | CodecFormat::Bmp) {
            return Err(ImageError::Encode {
                path: path.to_path_buf(),
                reason: format!("{format:?} is not a lossless output format"),
            });
        }
        self.to_dynamic()
            .save_with_format(path, format)
            .map_err(|e| ImageError::Encode {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })
    }
}

/// Content-derived classification of a scanned file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FileFormat {
    Png,
    Bmp,
    /// JPEG, WebP and similar: decoded and analysed, but flagged.
    Lossy,
    NonImage,
}

impl FileFormat {
    pub fn is_image(self) -> bool {
        !matches!(self, FileFormat::NonImage)
    }

    pub fn is_lossy(self) -> bool {
        matches!(self, FileFormat::Lossy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanTarget {
    pub path: PathBuf,
    pub format: FileFormat,
}

fn classify_bytes(head: &[u8]) -> FileFormat {
    match image::guess_format(head) {
        Ok(CodecFormat::Png) => FileFormat::Png,
        Ok(CodecFormat::Bmp) => FileFormat::Bmp,
        Ok(CodecFormat::Jpeg) | Ok(CodecFormat::WebP) => FileFormat::Lossy,
        _ => FileFormat::NonImage,
    }
}

/// Classifies a file from its leading bytes. Unreadable files are non-images.
pub fn classify_file(path: &Path) -> FileFormat {
    let mut head = [0u8; 32];
    let n = fs::File::open(path).and_then(|mut f| {
        let mut read = 0;
        while read < head.len() {
            match f.read(&mut head[read..])? {
                0 => break,
                k => read += k,
            }
        }
        Ok(read)
    });
    match n {
        Ok(n) => classify_bytes(&head[..n]),
        Err(_) => FileFormat::NonImage,
    }
}

/// Lists the regular files directly inside `dir`, sorted by file name and classified.
pub fn scan_directory(dir: &Path) -> Result<Vec<ScanTarget>, ImageError> {
    if !dir.is_dir() {
        return Err(ImageError::NotADirectory(dir.to_path_buf()));
    }
    let entries = fs::read_dir(dir).map_err(|source| ImageError::UnreadableFile {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| ImageError::UnreadableFile {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files
        .into_iter()
        .map(|path| {
            let format = classify_file(&path);
            ScanTarget { path, format }
        })
        .collect())
}

/// Decodes `path` into sample planes. Alpha is dropped and palettes are expanded to RGB.
pub fn decode_image(path: &Path) -> Result<SampleImage, ImageError> {
    let bytes = fs::read(path).map_err(|source| ImageError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })?;
    let format = classify_bytes(&bytes[..bytes.len().min(32)]);
    if !format.is_image() {
        return Err(ImageError::NotAnImage {
            path: path.to_path_buf(),
            reason: "unrecognised content".into(),
        });
    }
    let decoded = image::load_from_memory(&bytes).map_err(|e| ImageError::NotAnImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let depth_err = |depth| ImageError::UnsupportedDepth {
        path: path.to_path_buf(),
        depth,
    };
    let planes = match decoded {
        DynamicImage::ImageLuma8(buf) => vec![buf.into_raw()],
        DynamicImage::ImageLumaA8(buf) => vec![buf.into_raw().chunks_exact(2).map(|p| p[0]).collect()],
        DynamicImage::ImageRgb8(buf) => split_planes(buf.as_raw(), 3, 3),
        DynamicImage::ImageRgba8(buf) => split_planes(buf.as_raw(), 4, 3),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_) => return Err(depth_err("16-bit grayscale")),
        DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => return Err(depth_err("16-bit colour")),
        DynamicImage::ImageRgb32F(_) | DynamicImage::ImageRgba32F(_) => return Err(depth_err("floating point")),
        _ => return Err(depth_err("an unknown sample layout")),
    };
    let mut img = SampleImage::from_planes(width, height, planes).map_err(|e| ImageError::NotAnImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    img.source_path = Some(path.to_path_buf());
    img.file_size = bytes.len() as u64;
    img.lossy_source = format.is_lossy();
    Ok(img)
}

fn split_planes(raw: &[u8], stride: usize, keep: usize) -> Vec<Vec<u8>> {
    (0..keep)
        .map(|c| raw.iter().skip(c).step_by(stride).copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize, channels: usize) -> SampleImage {
        let planes = (0..channels)
            .map(|c| (0..w * h).map(|i| ((i * 7 + c * 31) % 256) as u8).collect())
            .collect();
        SampleImage::from_planes(w, h, planes).unwrap()
    }

    #[test]
    fn black_png_decodes_to_zero_planes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("black.png");
        image::RgbImage::new(2, 2).save(&path).unwrap();
        let img = decode_image(&path).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (2, 2, 3));
        assert!(img.planes().iter().all(|p| p.iter().all(|&v| v == 0)));
        assert!(img.file_size() > 0);
        assert!(!img.is_lossy_source());
    }

    #[test]
    fn png_and_bmp_round_trip_to_identical_planes() {
        let dir = tempfile::tempdir().unwrap();
        let img = gradient(13, 7, 3);
        let png = dir.path().join("a.png");
        let bmp = dir.path().join("a.bmp");
        img.save(&png).unwrap();
        img.save(&bmp).unwrap();
        let from_png = decode_image(&png).unwrap();
        let from_bmp = decode_image(&bmp).unwrap();
        assert_eq!(from_png.planes(), img.planes());
        assert_eq!(from_bmp.planes(), img.planes());
    }

    #[test]
    fn grayscale_png_keeps_one_plane() {
        let dir = tempfile::tempdir().unwrap();
        let img = gradient(5, 4, 1);
        let path = dir.path().join("g.png");
        img.save(&path).unwrap();
        let back = decode_image(&path).unwrap();
        assert_eq!(back.channels(), 1);
        assert_eq!(back.planes(), img.planes());
    }

    #[test]
    fn alpha_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgba.png");
        let buf = image::RgbaImage::from_fn(3, 2, |x, y| image::Rgba([x as u8, y as u8, 9, 200]));
        buf.save(&path).unwrap();
        let img = decode_image(&path).unwrap();
        assert_eq!(img.channels(), 3);
        assert_eq!(img.plane(2), &[9u8; 6]);
    }

    #[test]
    fn text_renamed_to_png_is_not_an_image() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fake.png");
        fs::write(&path, "hello, not a picture").unwrap();
        assert!(matches!(decode_image(&path), Err(ImageError::NotAnImage { .. })));
        assert_eq!(classify_file(&path), FileFormat::NonImage);
    }

    #[test]
    fn sixteen_bit_png_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
            image::ImageBuffer::from_fn(4, 4, |x, _| image::Luma([x as u16 * 1000]));
        buf.save(&path).unwrap();
        assert!(matches!(decode_image(&path), Err(ImageError::UnsupportedDepth { .. })));
    }

    #[test]
    fn missing_file_is_unreadable() {
        let err = decode_image(Path::new("/definitely/not/here.png")).unwrap_err();
        assert!(matches!(err, ImageError::UnreadableFile { .. }));
    }

    #[test]
    fn scan_sorts_and_classifies() {
        let dir = tempfile::tempdir().unwrap();
        gradient(4, 4, 3).save(&dir.path().join("b.png")).unwrap();
        gradient(4, 4, 3).save(&dir.path().join("a.bmp")).unwrap();
        fs::write(dir.path().join("notes.txt"), "case notes").unwrap();
        fs::create_dir(dir.path().join("sub")).unwrap();
        let found = scan_directory(dir.path()).unwrap();
        let summary: Vec<_> = found
            .iter()
            .map(|t| (t.path.file_name().unwrap().to_str().unwrap().to_string(), t.format))
            .collect();
        assert_eq!(
            summary,
            vec![
                ("a.bmp".to_string(), FileFormat::Bmp),
                ("b.png".to_string(), FileFormat::Png),
                ("notes.txt".to_string(), FileFormat::NonImage),
            ]
        );
        assert_eq!(scan_directory(dir.path()).unwrap(), found);
    }

    #[test]
    fn jpeg_is_classified_lossy_and_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jpg");
        gradient(16, 16, 3).to_dynamic().save(&path).unwrap();
        let found = scan_directory(dir.path()).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].format, FileFormat::Lossy);
        assert!(decode_image(&path).unwrap().is_lossy_source());
    }

    #[test]
    fn empty_directory_scans_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(scan_directory(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn scanning_a_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        fs::write(&path, "x").unwrap();
        assert!(matches!(scan_directory(&path), Err(ImageError::NotADirectory(_))));
    }

    #[test]
    fn interleaved_indexing_matches_planes() {
        let img = gradient(3, 2, 3);
        let inter = img.to_interleaved();
        for (i, &v) in inter.iter().enumerate() {
            assert_eq!(img.sample(i), v);
        }
        let back = SampleImage::from_interleaved(3, 2, 3, &inter).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(SampleImage::from_planes(2, 2, vec![vec![0; 4]; 2]).is_err());
        assert!(SampleImage::from_planes(2, 2, vec![vec![0; 3]]).is_err());
        assert!(SampleImage::from_planes(0, 2, vec![vec![]]).is_err());
    }
}
