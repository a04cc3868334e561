// Piecewise-linear fit through samples of the Turbo colormap; index 0 is dark blue,
// index 255 dark red.
pub(crate) const TURBO: [[u8; 3]; 256] = [
    [48, 18, 59],
    [49, 21, 64],
    [49, 23, 69],
    [50, 26, 75],
    [50, 29, 80],
    [51, 32, 85],
    [51, 34, 90],
    [52, 37, 95],
    [52, 40, 101],
    [53, 43, 106],
    [53, 45, 111],
    [54, 48, 116],
    [54, 51, 121],
    [55, 53, 127],
    [55, 56, 132],
    [56, 59, 137],
    [57, 62, 142],
    [57, 64, 148],
    [58, 67, 153],
    [58, 70, 158],
    [59, 73, 163],
    [59, 75, 168],
    [60, 78, 174],
    [60, 81, 179],
    [61, 84, 184],
    [61, 86, 189],
    [62, 89, 194],
    [62, 92, 200],
    [63, 94, 205],
    [63, 97, 210],
    [64, 100, 215],
    [65, 103, 220],
    [65, 105, 225],
    [64, 107, 226],
    [63, 109, 226],
    [63, 111, 227],
    [62, 113, 228],
    [61, 115, 228],
    [60, 117, 229],
    [59, 120, 229],
    [59, 122, 230],
    [58, 124, 231],
    [57, 126, 231],
    [56, 128, 232],
    [55, 130, 233],
    [55, 132, 233],
    [54, 134, 234],
    [53, 136, 234],
    [52, 138, 235],
    [52, 140, 236],
    [51, 142, 236],
    [50, 144, 237],
    [49, 146, 238],
    [48, 148, 238],
    [48, 150, 239],
    [47, 152, 240],
    [46, 154, 240],
    [45, 156, 241],
    [45, 158, 241],
    [44, 160, 242],
    [43, 162, 243],
    [42, 164, 243],
    [41, 166, 244],
    [41, 168, 245],
    [40, 170, 245],
    [40, 172, 243],
    [39, 174, 241],
    [39, 176, 239],
    [39, 177, 237],
    [38, 179, 235],
    [38, 181, 233],
    [38, 183, 231],
    [37, 184, 229],
    [37, 186, 228],
    [37, 188, 226],
    [36, 189, 224],
    [36, 191, 222],
    [36, 193, 220],
    [36, 195, 218],
    [35, 196, 216],
    [35, 198, 214],
    [35, 200, 213],
    [34, 201, 211],
    [34, 203, 209],
    [34, 205, 207],
    [33, 207, 205],
    [33, 208, 203],
    [33, 210, 201],
    [32, 212, 199],
    [32, 214, 197],
    [32, 215, 196],
    [31, 217, 194],
    [31, 219, 192],
    [31, 220, 190],
    [31, 222, 188],
    [30, 224, 186],
    [31, 225, 184],
    [34, 226, 181],
    [37, 227, 178],
    [40, 228, 175],
    [42, 229, 172],
    [45, 230, 169],
    [48, 231, 166],
    [51, 232, 163],
    [54, 233, 160],
    [56, 234, 157],
    [59, 234, 154],
    [62, 235, 151],
    [65, 236, 148],
    [68, 237, 145],
    [71, 238, 142],
    [73, 239, 139],
    [76, 240, 136],
    [79, 241, 133],
    [82, 242, 130],
    [85, 243, 127],
    [88, 244, 124],
    [90, 244, 121],
    [93, 245, 118],
    [96, 246, 115],
    [99, 247, 112],
    [102, 248, 109],
    [104, 249, 106],
    [107, 250, 103],
    [110, 251, 100],
    [113, 252, 97],
    [116, 253, 94],
    [119, 254, 91],
    [121, 254, 89],
    [124, 253, 88],
    [126, 253, 87],
    [129, 252, 86],
    [131, 252, 85],
    [134, 252, 83],
    [136, 251, 82],
    [139, 251, 81],
    [141, 250, 80],
    [144, 250, 79],
    [146, 249, 77],
    [149, 249, 76],
    [151, 249, 75],
    [154, 248, 74],
    [156, 248, 73],
    [159, 247, 72],
    [161, 247, 70],
    [164, 246, 69],
    [166, 246, 68],
    [169, 245, 67],
    [171, 245, 66],
    [174, 245, 64],
    [176, 244, 63],
    [179, 244, 62],
    [181, 243, 61],
    [184, 243, 60],
    [187, 242, 58],
    [189, 242, 57],
    [192, 241, 56],
    [194, 241, 55],
    [197, 241, 54],
    [199, 240, 52],
    [201, 239, 52],
    [203, 237, 52],
    [204, 235, 51],
    [206, 233, 51],
    [208, 231, 51],
    [209, 229, 51],
    [211, 228, 51],
    [212, 226, 50],
    [214, 224, 50],
    [216, 222, 50],
    [217, 220, 50],
    [219, 218, 49],
    [221, 216, 49],
    [222, 214, 49],
    [224, 212, 49],
    [225, 211, 49],
    [227, 209, 48],
    [229, 207, 48],
    [230, 205, 48],
    [232, 203, 48],
    [234, 201, 47],
    [235, 199, 47],
    [237, 197, 47],
    [239, 196, 47],
    [240, 194, 47],
    [242, 192, 46],
    [243, 190, 46],
    [245, 188, 46],
    [247, 186, 46],
    [248, 184, 45],
    [250, 182, 45],
    [252, 180, 45],
    [251, 178, 44],
    [251, 175, 43],
    [250, 172, 42],
    [249, 169, 41],
    [249, 167, 41],
    [248, 164, 40],
    [247, 161, 39],
    [247, 158, 38],
    [246, 155, 37],
    [245, 152, 36],
    [245, 150, 35],
    [244, 147, 34],
    [243, 144, 33],
    [243, 141, 32],
    [242, 138, 31],
    [241, 136, 30],
    [240, 133, 29],
    [240, 130, 28],
    [239, 127, 27],
    [238, 124, 26],
    [238, 121, 25],
    [237, 119, 25],
    [236, 116, 24],
    [236, 113, 23],
    [235, 110, 22],
    [234, 107, 21],
    [234, 104, 20],
    [233, 102, 19],
    [232, 99, 18],
    [231, 96, 17],
    [231, 93, 16],
    [230, 90, 15],
    [227, 88, 15],
    [224, 85, 14],
    [220, 82, 14],
    [217, 80, 14],
    [213, 77, 13],
    [210, 74, 13],
    [207, 71, 12],
    [203, 69, 12],
    [200, 66, 12],
    [197, 63, 11],
    [193, 61, 11],
    [190, 58, 11],
    [186, 55, 10],
    [183, 53, 10],
    [180, 50, 9],
    [176, 47, 9],
    [173, 44, 9],
    [169, 42, 8],
    [166, 39, 8],
    [163, 36, 8],
    [159, 34, 7],
    [156, 31, 7],
    [152, 28, 6],
    [149, 26, 6],
    [146, 23, 6],
    [142, 20, 5],
    [139, 17, 5],
    [136, 15, 5],
    [132, 12, 4],
    [129, 9, 4],
    [125, 7, 3],
    [122, 4, 3],
];
