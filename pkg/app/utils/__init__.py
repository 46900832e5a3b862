# plane_lie_toolkit utils package