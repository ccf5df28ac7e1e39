"""Fixed 26-vertex hand skeleton layout.

The tracked hand arrives as 26 posed vertices.  The layout below is the
frozen wire contract used by every module: wrist, palm, then four points
per thumb and five per finger, thumb through little finger.
"""

from __future__ import annotations

WRIST = 0
PALM = 1

THUMB_METACARPAL = 2
THUMB_PROXIMAL = 3
THUMB_DISTAL = 4
THUMB_TIP = 5

INDEX_METACARPAL = 6
INDEX_PROXIMAL = 7
INDEX_INTERMEDIATE = 8
INDEX_DISTAL = 9
INDEX_TIP = 10

MIDDLE_METACARPAL = 11
MIDDLE_PROXIMAL = 12
MIDDLE_INTERMEDIATE = 13
MIDDLE_DISTAL = 14
MIDDLE_TIP = 15

RING_METACARPAL = 16
RING_PROXIMAL = 17
RING_INTERMEDIATE = 18
RING_DISTAL = 19
RING_TIP = 20

LITTLE_METACARPAL = 21
LITTLE_PROXIMAL = 22
LITTLE_INTERMEDIATE = 23
LITTLE_DISTAL = 24
LITTLE_TIP = 25

VERTEX_COUNT = 26

VERTEX_NAMES = (
    "wrist", "palm",
    "thumb_metacarpal", "thumb_proximal", "thumb_distal", "thumb_tip",
    "index_metacarpal", "index_proximal", "index_intermediate", "index_distal", "index_tip",
    "middle_metacarpal", "middle_proximal", "middle_intermediate", "middle_distal", "middle_tip",
    "ring_metacarpal", "ring_proximal", "ring_intermediate", "ring_distal", "ring_tip",
    "little_metacarpal", "little_proximal", "little_intermediate", "little_distal", "little_tip",
)

# Robot joint-vector order: four joints per finger, thumb last.
FINGER_ORDER = ("index", "middle", "ring", "thumb")

# Vertex chain per finger used for length scaling and target construction.
# The first chain entry is the finger root (the metacarpal segment never
# enters the scaling sums), the last is the tip.
FINGER_CHAINS = {
    "thumb": (THUMB_PROXIMAL, THUMB_DISTAL, THUMB_TIP),
    "index": (INDEX_PROXIMAL, INDEX_INTERMEDIATE, INDEX_DISTAL, INDEX_TIP),
    "middle": (MIDDLE_PROXIMAL, MIDDLE_INTERMEDIATE, MIDDLE_DISTAL, MIDDLE_TIP),
    "ring": (RING_PROXIMAL, RING_INTERMEDIATE, RING_DISTAL, RING_TIP),
    "little": (LITTLE_PROXIMAL, LITTLE_INTERMEDIATE, LITTLE_DISTAL, LITTLE_TIP),
}

# Fingertips checked by the fist detector (thumb excluded).
FIST_FINGERTIPS = (INDEX_TIP, MIDDLE_TIP, RING_TIP, LITTLE_TIP)

# Slice of the 16-joint vector owned by each finger.
JOINT_SLICES = {
    "index": slice(0, 4),
    "middle": slice(4, 8),
    "ring": slice(8, 12),
    "thumb": slice(12, 16),
}

# Joint 0 of each non-thumb finger is the root/abduction joint, held at zero.
ROOT_JOINT_INDICES = (0, 4, 8)

NUM_JOINTS = 16
