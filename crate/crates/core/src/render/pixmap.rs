//! A minimal owned RGB8 raster with line drawing.
//!
//! Drawing silently clips to the canvas. Production frames use the integer
//! Bresenham path, which only ever writes fully-saturated (255) pixels; the
//! anti-aliased path blends Wu-style coverage with a max() so re-drawing is
//! order-insensitive and idempotent per segment.

/// Row-major, interleaved RGB pixel buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Pixmap {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height * 3] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Interleaved RGB bytes, row-major.
    /// Rebuilds a pixmap from raw RGB8 bytes; `None` if the length does not
    /// match `width × height × 3`.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Option<Self> {
        (data.len() == width * height * 3).then_some(Self { width, height, data })
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize, channel: usize) -> u8 {
        self.data[(y * self.width + x) * 3 + channel]
    }

    /// Writes one channel of one pixel; out-of-bounds coordinates are ignored.
    pub fn set(&mut self, x: i64, y: i64, channel: usize, value: u8) {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return;
        }
        self.data[(y as usize * self.width + x as usize) * 3 + channel] = value;
    }

    /// Keeps the brighter of the existing and incoming value.
    fn blend_max(&mut self, x: i64, y: i64, channel: usize, value: u8) {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return;
        }
        let idx = (y as usize * self.width + x as usize) * 3 + channel;
        self.data[idx] = self.data[idx].max(value);
    }

    pub fn fill(&mut self, rgb: [u8; 3]) {
        for px in self.data.chunks_exact_mut(3) {
            px.copy_from_slice(&rgb);
        }
    }

    /// Classic integer Bresenham segment into a single channel at full intensity.
    pub fn draw_line(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, channel: usize) {
        self.draw_line_rgb(x0, y0, x1, y1, single_channel(channel));
    }

    /// Bresenham segment with an RGB color (zero components left untouched).
    pub fn draw_line_rgb(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, rgb: [u8; 3]) {
        let (mut x, mut y) = (x0, y0);
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.put_rgb_max(x, y, rgb);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    /// Anti-aliased segment (Xiaolin Wu) with an RGB color, blended by max().
    pub fn draw_line_aa(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, rgb: [u8; 3]) {
        let steep = (y1 - y0).abs() > (x1 - x0).abs();
        let (mut x0, mut y0, mut x1, mut y1) = if steep { (y0, x0, y1, x1) } else { (x0, y0, x1, y1) };
        if x0 > x1 {
            std::mem::swap(&mut x0, &mut x1);
            std::mem::swap(&mut y0, &mut y1);
        }
        let dx = x1 - x0;
        let gradient = if dx == 0.0 { 1.0 } else { (y1 - y0) / dx };

        let mut plot = |x: i64, y: i64, c: f64| {
            let v = (c.clamp(0.0, 1.0) * 255.0).round() as u16;
            let scaled = [
                ((rgb[0] as u16 * v) / 255) as u8,
                ((rgb[1] as u16 * v) / 255) as u8,
                ((rgb[2] as u16 * v) / 255) as u8,
            ];
            if steep {
                self.put_rgb_max(y, x, scaled);
            } else {
                self.put_rgb_max(x, y, scaled);
            }
        };

        // First endpoint.
        let xend = x0.round();
        let yend = y0 + gradient * (xend - x0);
        let xgap = 1.0 - (x0 + 0.5).fract();
        let xpx1 = xend as i64;
        let ypx1 = yend.floor() as i64;
        plot(xpx1, ypx1, (1.0 - yend.fract()) * xgap);
        plot(xpx1, ypx1 + 1, yend.fract() * xgap);
        let mut intery = yend + gradient;

        // Second endpoint.
        let xend2 = x1.round();
        let yend2 = y1 + gradient * (xend2 - x1);
        let xgap2 = (x1 + 0.5).fract();
        let xpx2 = xend2 as i64;
        let ypx2 = yend2.floor() as i64;

        for x in (xpx1 + 1)..xpx2 {
            plot(x, intery.floor() as i64, 1.0 - intery.fract());
            plot(x, intery.floor() as i64 + 1, intery.fract());
            intery += gradient;
        }
        plot(xpx2, ypx2, (1.0 - yend2.fract()) * xgap2);
        plot(xpx2, ypx2 + 1, yend2.fract() * xgap2);
    }

    fn put_rgb_max(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        for (channel, &value) in rgb.iter().enumerate() {
            if value > 0 {
                self.blend_max(x, y, channel, value);
            }
        }
    }

    /// Encodes the buffer as an RGB8 PNG.
    pub fn encode_png(&self) -> Vec<u8> {
        let mut out = std::io::Cursor::new(Vec::new());
        image::write_buffer_with_format(
            &mut out,
            &self.data,
            self.width as u32,
            self.height as u32,
            image::ExtendedColorType::Rgb8,
            image::ImageFormat::Png,
        )
        .expect("in-memory PNG encoding cannot fail");
        out.into_inner()
    }
}

fn single_channel(channel: usize) -> [u8; 3] {
    let mut rgb = [0u8; 3];
    rgb[channel] = 255;
    rgb
}

/// Draws straight segments between consecutive points into one channel.
///
/// This is the production rasterization path: plain Bresenham, no
/// anti-aliasing, out-of-canvas pixels silently clipped.
pub fn rasterize_polyline(points: &[(i64, i64)], channel: usize, pixmap: &mut Pixmap) {
    match points {
        [] => {}
        [p] => pixmap.set(p.0, p.1, channel, 255),
        _ => {
            for pair in points.windows(2) {
                pixmap.draw_line(pair[0].0, pair[0].1, pair[1].0, pair[1].1, channel);
            }
        }
    }
}
