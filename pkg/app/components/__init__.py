# plane_lie_toolkit components package