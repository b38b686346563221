//! Synthetic image suite shared by the integration tests.

use densal_core::imaging::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SingleBlob,
    TwoBlobs,
    BlobWithDistractor,
}

pub struct SynthCase {
    pub name: String,
    pub kind: Kind,
    pub image: RasterImage,
    /// Ground truth: true on salient (blob) pixels.
    pub gt: Vec<bool>,
    /// Pixel masks of the individual blobs, for multi-region checks.
    pub blobs: Vec<Vec<bool>>,
}

pub const WIDTH: usize = 128;
pub const HEIGHT: usize = 96;

struct Canvas {
    data: Vec<[u8; 3]>,
    blobs: Vec<Vec<bool>>,
}

impl Canvas {
    fn new(background: [u8; 3]) -> Self {
        Canvas {
            data: vec![background; WIDTH * HEIGHT],
            blobs: Vec::new(),
        }
    }

    fn disk(&mut self, cx: f64, cy: f64, r: f64, color: [u8; 3], salient: bool) {
        let mut mask = vec![false; WIDTH * HEIGHT];
        for y in 0..HEIGHT {
            for x in 0..WIDTH {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                if d < r {
                    self.data[y * WIDTH + x] = color;
                    mask[y * WIDTH + x] = true;
                }
            }
        }
        if salient {
            self.blobs.push(mask);
        }
    }

    /// Faint checkerboard texture over a rectangle; a non-salient distractor.
    fn texture(&mut self, x0: usize, y0: usize, w: usize, h: usize) {
        for y in y0..(y0 + h).min(HEIGHT) {
            for x in x0..(x0 + w).min(WIDTH) {
                if (x / 4 + y / 4) % 2 == 0 {
                    let p = &mut self.data[y * WIDTH + x];
                    p[0] = p[0].saturating_add(14);
                    p[1] = p[1].saturating_add(14);
                    p[2] = p[2].saturating_add(14);
                }
            }
        }
    }

    fn build(self, name: &str, kind: Kind) -> SynthCase {
        let mut gt = vec![false; WIDTH * HEIGHT];
        for mask in &self.blobs {
            for (g, &m) in gt.iter_mut().zip(mask) {
                *g |= m;
            }
        }
        SynthCase {
            name: name.to_string(),
            kind,
            image: RasterImage {
                width: WIDTH,
                height: HEIGHT,
                data: self.data,
            },
            gt,
            blobs: self.blobs,
        }
    }
}

const BLOB_COLORS: [[u8; 3]; 4] = [
    [220, 40, 40],
    [40, 70, 210],
    [240, 200, 40],
    [40, 190, 90],
];

/// Deterministic suite of at least 20 synthetic images: single compact blobs,
/// two-blob layouts and blob-plus-distractor-texture scenes.
pub fn synthetic_suite() -> Vec<SynthCase> {
    let mut cases = Vec::new();
    let bg = [112, 112, 118];

    // Eight single-blob images with varied position, radius and color.
    let singles = [
        (40.0, 48.0, 18.0),
        (64.0, 40.0, 22.0),
        (90.0, 56.0, 16.0),
        (50.0, 30.0, 20.0),
        (80.0, 64.0, 19.0),
        (36.0, 60.0, 17.0),
        (70.0, 50.0, 24.0),
        (58.0, 62.0, 18.0),
    ];
    for (i, &(cx, cy, r)) in singles.iter().enumerate() {
        let mut c = Canvas::new(bg);
        c.disk(cx, cy, r, BLOB_COLORS[i % 4], true);
        cases.push(c.build(&format!("single_{i}"), Kind::SingleBlob));
    }

    // Seven two-blob images, well separated.
    let doubles = [
        ((34.0, 34.0, 15.0), (94.0, 62.0, 15.0)),
        ((30.0, 60.0, 14.0), (96.0, 32.0, 16.0)),
        ((40.0, 48.0, 16.0), (92.0, 48.0, 14.0)),
        ((36.0, 30.0, 14.0), (88.0, 68.0, 15.0)),
        ((30.0, 48.0, 13.0), (98.0, 48.0, 17.0)),
        ((44.0, 64.0, 15.0), (90.0, 28.0, 14.0)),
        ((32.0, 28.0, 16.0), (94.0, 70.0, 13.0)),
    ];
    for (i, &((ax, ay, ar), (bx, by, br))) in doubles.iter().enumerate() {
        let mut c = Canvas::new(bg);
        c.disk(ax, ay, ar, BLOB_COLORS[i % 4], true);
        c.disk(bx, by, br, BLOB_COLORS[(i + 1) % 4], true);
        cases.push(c.build(&format!("double_{i}"), Kind::TwoBlobs));
    }

    // Five blob-plus-distractor-texture images.
    let distractors = [
        ((44.0, 50.0, 19.0), (84, 12)),
        ((80.0, 40.0, 18.0), (8, 60)),
        ((56.0, 60.0, 20.0), (90, 64)),
        ((38.0, 36.0, 17.0), (80, 56)),
        ((72.0, 56.0, 21.0), (6, 8)),
    ];
    for (i, &((cx, cy, r), (tx, ty))) in distractors.iter().enumerate() {
        let mut c = Canvas::new(bg);
        c.texture(tx, ty, 30, 24);
        c.disk(cx, cy, r, BLOB_COLORS[i % 4], true);
        cases.push(c.build(&format!("distractor_{i}"), Kind::BlobWithDistractor));
    }

    assert!(cases.len() >= 20);
    cases
}
